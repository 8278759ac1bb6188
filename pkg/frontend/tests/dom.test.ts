// @vitest-environment happy-dom
import { afterAll, beforeAll, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { renderApp, type AppHandle } from "../src/dom.js";
import { FormEngine } from "../src/form.js";
import { DraftStorage } from "../src/storage.js";
import type { SchemaDoc } from "../src/types.js";
import { nodeFetch, startService, type RunningService } from "./service.js";

let service: RunningService;
let api: ApiClient;
let schema: SchemaDoc;

beforeAll(async () => {
  service = await startService(8663);
  api = new ApiClient(service.base, nodeFetch);
  schema = await api.schema();
});

afterAll(async () => {
  await service.stop();
});

interface Mounted {
  engine: FormEngine;
  root: HTMLElement;
  handle: AppHandle;
}

function mount(sheetId: string): Mounted {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const engine = new FormEngine(schema, sheetId, {
    storage: new DraftStorage(window.localStorage, sheetId),
  });
  const handle = renderApp(engine, api, root, { debounceMs: 0 });
  return { engine, root, handle };
}

it("draws 25 visible question cards on a fresh load", async () => {
  const { root, handle } = mount("dom-fresh");
  expect(root.querySelectorAll(".question")).toHaveLength(27);
  expect(root.querySelectorAll(".question:not(.hidden)")).toHaveLength(25);
  expect(
    root.querySelector('.question[data-qid="M2"]')?.classList.contains("hidden"),
  ).toBe(true);
  expect(
    root.querySelector('.question[data-qid="M5"]')?.classList.contains("hidden"),
  ).toBe(true);
  await handle.settled();
});

it("lists the fifteen mandatory findings the service reports for an empty form", async () => {
  const { engine, root, handle } = mount("dom-empty");
  await handle.settled();
  expect(engine.serverDiags).not.toBeNull();
  expect(root.querySelectorAll(".findings .diagnostic.error")).toHaveLength(15);
  expect(root.querySelector(".meter-overall")?.textContent).toBe(
    "completeness: 0%",
  );
});

it("reveals the judge details card when a model-based judge is checked", async () => {
  const { root, handle } = mount("dom-judge");
  const checkbox = root.querySelector(
    'input[data-qid="M1"][data-token="model_llm"]',
  ) as HTMLInputElement;
  checkbox.checked = true;
  checkbox.dispatchEvent(new Event("change"));
  const card = root.querySelector('.question[data-qid="M2"]');
  expect(card?.classList.contains("hidden")).toBe(false);

  checkbox.checked = false;
  checkbox.dispatchEvent(new Event("change"));
  expect(card?.classList.contains("hidden")).toBe(true);
  await handle.settled();
});

it("opens the heldout details card once the flag is answered", async () => {
  const { root, handle } = mount("dom-flag");
  const card = root.querySelector('.question[data-qid="M5"]');
  expect(card?.classList.contains("hidden")).toBe(true);
  const no = root.querySelector(
    'input[data-qid="M5"][data-flag-value="false"]',
  ) as HTMLInputElement;
  no.checked = true;
  no.dispatchEvent(new Event("change"));
  expect(card?.classList.contains("hidden")).toBe(false);
  await handle.settled();
});

it("keeps typed answers across a reload via local storage", async () => {
  const first = mount("dom-persist");
  const input = first.root.querySelector(
    'input[data-qid="C1"]',
  ) as HTMLInputElement;
  input.value = "Sticky title";
  input.dispatchEvent(new Event("input"));
  expect(first.engine.draft("C1")).toBe("Sticky title");
  await first.handle.settled();

  const second = mount("dom-persist");
  const restored = second.root.querySelector(
    'input[data-qid="C1"]',
  ) as HTMLInputElement;
  expect(restored.value).toBe("Sticky title");
  await second.handle.settled();
});

it("shows inline findings on the card they belong to", async () => {
  const { root, handle } = mount("dom-inline");
  await handle.settled();
  const card = root.querySelector('.question[data-qid="C1"]');
  const inline = card?.querySelectorAll(".issues .diagnostic.error") ?? [];
  expect(inline.length).toBe(1);
});
