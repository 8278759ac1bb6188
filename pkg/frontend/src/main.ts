import { ApiClient, ApiError, ServiceUnreachable } from "./api.js";
import { renderApp } from "./dom.js";
import { FormEngine } from "./form.js";
import { DraftStorage } from "./storage.js";

const DEFAULT_SHEET = "draft";

function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const sheetId = params.get("sheet") ?? DEFAULT_SHEET;
  void start(api, sheetId, root);
}

async function start(
  api: ApiClient,
  sheetId: string,
  root: HTMLElement,
): Promise<void> {
  root.textContent = "loading the questionnaire…";
  try {
    const schema = await api.schema();
    const storage = new DraftStorage(window.localStorage, sheetId);
    const hadDraft = storage.load() !== null;
    const engine = new FormEngine(schema, sheetId, { storage });
    if (!hadDraft) {
      // nothing half-typed locally, so a stored copy is the baseline
      try {
        const entry = await api.load(sheetId);
        if (entry.factsheet) engine.loadDocument(entry.factsheet);
        engine.revision = entry.revision;
        engine.dirty = false;
      } catch (error) {
        if (!(error instanceof ApiError && error.status === 404)) throw error;
      }
    }
    renderApp(engine, api, root);
  } catch (error) {
    showBlockingBanner(root, error, () => void start(api, sheetId, root));
  }
}

function showBlockingBanner(
  root: HTMLElement,
  error: unknown,
  retry: () => void,
): void {
  root.textContent = "";
  const banner = document.createElement("div");
  banner.className = "banner error";
  const message = document.createElement("p");
  message.textContent =
    error instanceof ServiceUnreachable
      ? "The factsheet service is unreachable. Check that it is running, then retry."
      : `Could not load the questionnaire: ${String(error)}`;
  const button = document.createElement("button");
  button.type = "button";
  button.textContent = "Retry";
  button.addEventListener("click", retry);
  banner.append(message, button);
  root.appendChild(banner);
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", bootstrap);
} else {
  bootstrap();
}
