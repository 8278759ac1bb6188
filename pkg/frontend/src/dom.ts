import { ApiClient, ApiError } from "./api.js";
import { debounce } from "./debounce.js";
import {
  OTHER,
  structuredShape,
  type FlagDraft,
  type JudgeDraft,
  type SizeDraft,
  type SplitDraft,
  type TaggedDraft,
  type TermDraft,
} from "./drafts.js";
import type { FormEngine } from "./form.js";
import type { QuestionSpec, VocabularySpec } from "./types.js";

export const RENDER_TARGETS = ["canonical", "hypertext", "plainmark", "card"];

export interface AppOptions {
  /** Delay before a change triggers server validation. */
  debounceMs?: number;
}

export interface AppHandle {
  /** Unhook from the engine and drop any queued validation. */
  dispose: () => void;
  /** Resolves once no validation request is queued or in flight. */
  settled: () => Promise<void>;
}

interface Ctx {
  engine: FormEngine;
  api: ApiClient;
  el: (tag: string, className?: string, text?: string) => HTMLElement;
  /** Run on every engine change; widgets register their refreshers here. */
  updaters: Array<() => void>;
  /** Tear down and re-render from current engine state. */
  rebuild: () => void;
}

const disposers = new WeakMap<HTMLElement, () => void>();

/**
 * Build the wizard once and keep it updated in place.  Widgets are
 * never recreated on state changes (so typing keeps focus); only
 * visibility classes, issue lists, the meter, and status text move.
 * Adopting a server copy re-renders the whole page instead.
 */
export function renderApp(
  engine: FormEngine,
  api: ApiClient,
  root: HTMLElement,
  options: AppOptions = {},
): AppHandle {
  disposers.get(root)?.();

  const doc = root.ownerDocument;
  const ctx: Ctx = {
    engine,
    api,
    el: (tag, className, text) => {
      const node = doc.createElement(tag);
      if (className) node.className = className;
      if (text !== undefined) node.textContent = text;
      return node;
    },
    updaters: [],
    rebuild: () => renderApp(engine, api, root, options),
  };

  let inFlight = 0;
  let requestSeq = 0;
  const validation = debounce(() => {
    const seq = ++requestSeq;
    inFlight += 1;
    api
      .validate(engine.payload())
      // Drop responses a newer request has overtaken.
      .then((response) => {
        if (seq === requestSeq) engine.applyValidation(response);
      })
      .catch(() => {
        if (seq === requestSeq) engine.markStale();
      })
      .finally(() => {
        inFlight -= 1;
      });
  }, options.debounceMs ?? 400);

  root.textContent = "";
  const app = ctx.el("div", "efs-form");
  root.appendChild(app);

  app.appendChild(buildToolbar(ctx));
  app.appendChild(buildMeter(ctx));
  const nav = ctx.el("nav", "wizard-nav");
  app.appendChild(nav);
  const body = ctx.el("div", "wizard-body");
  app.appendChild(body);

  for (const dimension of engine.schema.dimensions) {
    const section = ctx.el("section", "step");
    section.dataset.dimension = dimension;
    section.appendChild(ctx.el("h2", "", engine.schema.sections[dimension]));
    for (const q of engine.schema.questions) {
      if (q.dimension !== dimension) continue;
      if (q.kind === "flag" && q.sub_answer) {
        section.appendChild(buildFlagToggle(ctx, q));
      }
      section.appendChild(buildQuestionCard(ctx, q));
    }
    body.appendChild(section);

    const tab = ctx.el("button", "", engine.schema.sections[dimension]);
    tab.setAttribute("type", "button");
    tab.addEventListener("click", () => engine.setActiveSection(dimension));
    nav.appendChild(tab);
    ctx.updaters.push(() => {
      const active = engine.activeSection === dimension;
      tab.classList.toggle("active", active);
      section.classList.toggle("inactive", !active);
    });
  }

  const extensionsTab = ctx.el("button", "", "Extensions");
  extensionsTab.setAttribute("type", "button");
  nav.appendChild(extensionsTab);
  const extensionsPanel = buildExtensionsPanel(ctx);
  body.appendChild(extensionsPanel);
  let showExtensions = false;
  extensionsTab.addEventListener("click", () => {
    showExtensions = !showExtensions;
    update();
  });
  ctx.updaters.push(() => {
    extensionsTab.classList.toggle("active", showExtensions);
    extensionsPanel.classList.toggle("inactive", !showExtensions);
  });

  app.appendChild(buildSummary(ctx));
  app.appendChild(buildConflictPrompt(ctx));
  app.appendChild(
    ctx.el(
      "p",
      "hint nonnormative",
      "Field guidance in this form is editorial; only the stored answers matter.",
    ),
  );

  const update = () => {
    for (const fn of ctx.updaters) fn();
  };
  // Revalidate only when drafts changed; validation results themselves
  // also emit, and reacting to those would loop forever.
  let validatedVersion = -1;
  const unsubscribe = engine.subscribe(() => {
    update();
    if (engine.draftVersion !== validatedVersion) {
      validatedVersion = engine.draftVersion;
      validation.call();
    }
  });
  const dispose = () => {
    unsubscribe();
    validation.cancel();
  };
  disposers.set(root, dispose);

  update();
  validatedVersion = engine.draftVersion;
  validation.call();

  return {
    dispose,
    settled: async () => {
      while (validation.pending() || inFlight > 0) {
        await new Promise((resolve) => setTimeout(resolve, 10));
      }
    },
  };
}

function buildToolbar(ctx: Ctx): HTMLElement {
  const { el, engine, api } = ctx;
  const bar = el("header", "toolbar");
  bar.appendChild(el("strong", "sheet-id", engine.sheetId));
  const status = el("span", "save-status");

  const save = el("button", "save", "Save") as HTMLButtonElement;
  save.type = "button";
  const publish = el("button", "publish", "Publish") as HTMLButtonElement;
  publish.type = "button";

  const runSave = (requirePublishable: boolean) => {
    engine
      .save(api, { requirePublishable })
      .then((entry) => {
        status.textContent = `saved revision ${entry.revision}`;
        status.className = "save-status ok";
      })
      .catch((error) => {
        if (error instanceof ApiError && error.status === 409) return;
        status.textContent =
          error instanceof ApiError
            ? `save failed: ${error.message}`
            : "save failed: service unreachable";
        status.className = "save-status bad";
      });
  };
  save.addEventListener("click", () => runSave(false));
  publish.addEventListener("click", () => runSave(true));

  const target = el("select", "export-target") as HTMLSelectElement;
  for (const name of RENDER_TARGETS) {
    const option = el("option", "", name) as HTMLOptionElement;
    option.value = name;
    target.appendChild(option);
  }
  const exportButton = el("button", "export", "Export") as HTMLButtonElement;
  exportButton.type = "button";
  const exportMsg = el("div", "export-message");
  exportButton.addEventListener("click", () => {
    exportMsg.className = "export-message";
    exportMsg.textContent = "";
    const blockers = engine.exportBlockers();
    if (blockers.length) {
      exportMsg.appendChild(el("p", "bad", "Export blocked:"));
      const list = el("ul", "blockers");
      for (const issue of blockers) {
        const where = issue.question_id ? `${issue.question_id}: ` : "";
        list.appendChild(el("li", "", `${where}${issue.message}`));
      }
      exportMsg.appendChild(list);
      return;
    }
    api
      .render(engine.payload(), target.value)
      .then((text) => offerDownload(ctx, exportMsg, target.value, text))
      .catch((error) => {
        exportMsg.className = "export-message bad";
        exportMsg.textContent = `export failed: ${String(error)}`;
      });
  });

  bar.append(save, publish, target, exportButton, status, exportMsg);
  ctx.updaters.push(() => {
    save.textContent = engine.dirty ? "Save (unsaved changes)" : "Save";
  });
  return bar;
}

const EXPORT_MEDIA: Record<string, { type: string; extension: string }> = {
  canonical: { type: "text/plain", extension: ".efs" },
  hypertext: { type: "text/html", extension: ".html" },
  plainmark: { type: "text/markdown", extension: ".md" },
  card: { type: "text/plain", extension: ".tex" },
};

function offerDownload(
  ctx: Ctx,
  into: HTMLElement,
  target: string,
  text: string,
): void {
  const media = EXPORT_MEDIA[target] ?? { type: "text/plain", extension: ".txt" };
  const name = `${ctx.engine.sheetId}${media.extension}`;
  try {
    const url = URL.createObjectURL(new Blob([text], { type: media.type }));
    const link = ctx.el("a", "download", `download ${name}`) as HTMLAnchorElement;
    link.href = url;
    link.download = name;
    into.appendChild(link);
    link.click();
  } catch {
    // no Blob URLs here (tests); show the text instead
    const fallback = ctx.el("textarea", "export-output") as HTMLTextAreaElement;
    fallback.readOnly = true;
    fallback.value = text;
    into.appendChild(fallback);
  }
}

function buildMeter(ctx: Ctx): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "meter");
  const overall = el("div", "meter-overall");
  const stale = el("span", "stale-badge", "results out of date");
  const bars = el("div", "meter-bars");
  box.append(overall, stale, bars);

  ctx.updaters.push(() => {
    const report = engine.serverCompleteness;
    stale.classList.toggle("shown", engine.stale);
    if (!report) {
      overall.textContent = "completeness: pending";
      return;
    }
    overall.textContent = `completeness: ${Math.round(report.overall * 100)}%`;
    bars.textContent = "";
    for (const score of report.dimensions) {
      const row = el("div", "meter-row");
      row.dataset.dimension = score.dimension;
      const label = engine.schema.sections[score.dimension];
      row.appendChild(
        el("span", "meter-label", `${label}: ${score.answered}/${score.applicable}`),
      );
      const track = el("span", "meter-track");
      const fill = el("span", "meter-fill");
      fill.style.width = `${Math.round(score.ratio * 100)}%`;
      track.appendChild(fill);
      row.appendChild(track);
      bars.appendChild(row);
    }
  });
  return box;
}

function vocabularyOf(ctx: Ctx, q: QuestionSpec): VocabularySpec | null {
  if (!q.vocabulary) return null;
  return ctx.engine.schema.vocabularies[q.vocabulary] ?? null;
}

function auxVocabularyOf(ctx: Ctx, q: QuestionSpec): VocabularySpec | null {
  if (!q.aux_vocabulary) return null;
  return ctx.engine.schema.vocabularies[q.aux_vocabulary] ?? null;
}

function buildFlagToggle(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const row = el("div", "flag-toggle");
  row.dataset.qid = q.id;
  row.appendChild(el("span", "prompt", q.prompt + (q.mandatory ? " *" : "")));
  const choices: Array<[string, boolean | null]> = [
    ["No answer", null],
    ["Yes", true],
    ["No", false],
  ];
  for (const [text, value] of choices) {
    const label = el("label", "radio");
    const input = el("input") as HTMLInputElement;
    input.type = "radio";
    input.name = `flag-${q.id}`;
    input.dataset.qid = q.id;
    input.dataset.flagValue = String(value);
    input.checked = (engine.draft(q.id) as FlagDraft).value === value;
    input.addEventListener("change", () => {
      const draft = engine.draft(q.id) as FlagDraft;
      engine.setAnswer(q.id, { value, details: draft.details });
    });
    label.append(input, el("span", "", text));
    row.appendChild(label);
  }
  return row;
}

function buildQuestionCard(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const card = el("article", "question");
  card.dataset.qid = q.id;
  const isFlagDetails = q.kind === "flag" && q.sub_answer !== null;
  const title = isFlagDetails && q.sub_answer ? q.sub_answer.prompt : q.prompt;
  card.appendChild(
    el("label", "prompt", title + (q.mandatory && !isFlagDetails ? " *" : "")),
  );
  card.appendChild(buildWidget(ctx, q));
  const issues = el("ul", "issues");
  card.appendChild(issues);

  ctx.updaters.push(() => {
    card.classList.toggle("hidden", !engine.questionVisible(q.id));
    issues.textContent = "";
    for (const diag of engine.diagnosticsFor(q.id)) {
      issues.appendChild(
        el("li", `diagnostic ${diag.severity}`, `[${diag.code}] ${diag.message}`),
      );
    }
    for (const issue of engine.localIssues()) {
      if (issue.question_id === q.id) {
        issues.appendChild(el("li", "diagnostic local", issue.message));
      }
    }
  });
  return card;
}

function buildWidget(ctx: Ctx, q: QuestionSpec): HTMLElement {
  switch (q.kind) {
    case "text":
    case "url":
    case "date":
      return buildTextInput(ctx, q);
    case "long_text":
      return buildTextarea(ctx, q);
    case "flag":
      return buildFlagDetails(ctx, q);
    case "enum_one":
      return buildSelectOne(ctx, q);
    case "enum_many":
      return buildCheckboxes(ctx, q);
    case "text_list":
    case "step_list":
      return buildLineList(ctx, q);
    case "split_list":
      return buildSplitRows(ctx, q);
    case "structured":
      switch (structuredShape(q)) {
        case "size":
          return buildSizeWidget(ctx, q);
        case "judge":
          return buildJudgeWidget(ctx, q);
        case "tagged":
          return buildTaggedWidget(ctx, q);
      }
  }
}

function buildTextInput(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget");
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.dataset.qid = q.id;
  input.value = engine.draft(q.id) as string;
  if (q.kind === "date") {
    // year-only release dates are legal, so no calendar control
    input.placeholder = "YYYY or YYYY-MM-DD";
  }
  if (q.kind === "url") input.placeholder = "https://";
  input.addEventListener("input", () => engine.setAnswer(q.id, input.value));
  box.appendChild(input);
  return box;
}

function buildTextarea(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget");
  const area = el("textarea") as HTMLTextAreaElement;
  area.dataset.qid = q.id;
  area.value = engine.draft(q.id) as string;
  area.addEventListener("input", () => engine.setAnswer(q.id, area.value));
  box.appendChild(area);
  return box;
}

function buildFlagDetails(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget");
  const area = el("textarea") as HTMLTextAreaElement;
  area.dataset.qid = q.id;
  if (q.sub_answer) area.dataset.subKey = q.sub_answer.key;
  area.value = (engine.draft(q.id) as FlagDraft).details;
  area.addEventListener("input", () => {
    const draft = engine.draft(q.id) as FlagDraft;
    engine.setAnswer(q.id, { value: draft.value, details: area.value });
  });
  box.appendChild(area);
  return box;
}

function buildSelectOne(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget");
  const select = el("select") as HTMLSelectElement;
  select.dataset.qid = q.id;
  const blank = el("option", "", "(unanswered)") as HTMLOptionElement;
  blank.value = "";
  select.appendChild(blank);
  for (const term of vocabularyOf(ctx, q)?.terms ?? []) {
    const option = el("option", "", term.display) as HTMLOptionElement;
    option.value = term.token;
    select.appendChild(option);
  }
  const raw = el("input", "other-raw") as HTMLInputElement;
  raw.type = "text";
  raw.placeholder = "describe the other value";

  const current = engine.draft(q.id) as TermDraft | null;
  select.value = current?.token ?? "";
  raw.value = current?.raw ?? "";

  const push = () => {
    engine.setAnswer(
      q.id,
      select.value ? { token: select.value, raw: raw.value } : null,
    );
  };
  select.addEventListener("change", push);
  raw.addEventListener("input", push);

  box.append(select, raw);
  ctx.updaters.push(() => {
    const draft = engine.draft(q.id) as TermDraft | null;
    raw.classList.toggle("hidden", draft?.token !== OTHER);
  });
  return box;
}

function buildCheckboxes(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget checkboxes");
  const raw = el("input", "other-raw") as HTMLInputElement;
  raw.type = "text";
  raw.placeholder = "describe the other value";

  const inputs: HTMLInputElement[] = [];
  const push = () => {
    const picked: TermDraft[] = [];
    for (const input of inputs) {
      if (!input.checked) continue;
      const token = input.dataset.token ?? "";
      picked.push({ token, raw: token === OTHER ? raw.value : "" });
    }
    engine.setAnswer(q.id, picked);
  };

  const current = new Map(
    (engine.draft(q.id) as TermDraft[]).map((term) => [term.token, term]),
  );
  for (const term of vocabularyOf(ctx, q)?.terms ?? []) {
    const label = el("label", "checkbox");
    const input = el("input") as HTMLInputElement;
    input.type = "checkbox";
    input.dataset.qid = q.id;
    input.dataset.token = term.token;
    input.checked = current.has(term.token);
    input.addEventListener("change", push);
    inputs.push(input);
    label.append(input, el("span", "", term.display));
    box.appendChild(label);
  }
  raw.value = current.get(OTHER)?.raw ?? "";
  raw.addEventListener("input", push);
  box.appendChild(raw);

  ctx.updaters.push(() => {
    const tokens = (engine.draft(q.id) as TermDraft[]).map((t) => t.token);
    raw.classList.toggle("hidden", !tokens.includes(OTHER));
  });
  return box;
}

function buildLineList(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget");
  const area = el("textarea") as HTMLTextAreaElement;
  area.dataset.qid = q.id;
  area.placeholder =
    q.kind === "step_list" ? "one step per line, in order" : "one item per line";
  area.value = (engine.draft(q.id) as string[]).join("\n");
  area.addEventListener("input", () =>
    engine.setAnswer(q.id, area.value.split("\n")),
  );
  box.appendChild(area);
  return box;
}

function buildSplitRows(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget splits");
  const rowsBox = el("div", "split-rows");
  box.appendChild(rowsBox);

  const rows: Array<{ kind: HTMLSelectElement; description: HTMLInputElement }> = [];
  const push = () => {
    const drafts: SplitDraft[] = rows.map((row) => ({
      kind: row.kind.value,
      description: row.description.value,
    }));
    engine.setAnswer(q.id, drafts);
  };

  const addRow = (draft: SplitDraft) => {
    const row = el("div", "split-row");
    const kind = el("select") as HTMLSelectElement;
    const blank = el("option", "", "(kind)") as HTMLOptionElement;
    blank.value = "";
    kind.appendChild(blank);
    for (const term of auxVocabularyOf(ctx, q)?.terms ?? []) {
      const option = el("option", "", term.display) as HTMLOptionElement;
      option.value = term.token;
      kind.appendChild(option);
    }
    kind.value = draft.kind;
    const description = el("input") as HTMLInputElement;
    description.type = "text";
    description.placeholder = "what this split holds";
    description.value = draft.description;
    kind.addEventListener("change", push);
    description.addEventListener("input", push);
    const remove = el("button", "remove", "remove") as HTMLButtonElement;
    remove.type = "button";
    const entry = { kind, description };
    rows.push(entry);
    remove.addEventListener("click", () => {
      rows.splice(rows.indexOf(entry), 1);
      row.remove();
      push();
    });
    row.append(kind, description, remove);
    rowsBox.appendChild(row);
  };

  for (const draft of engine.draft(q.id) as SplitDraft[]) addRow(draft);
  const add = el("button", "add", "add split") as HTMLButtonElement;
  add.type = "button";
  add.addEventListener("click", () => addRow({ kind: "", description: "" }));
  box.appendChild(add);
  return box;
}

function buildSizeWidget(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget size");
  const draft = engine.draft(q.id) as SizeDraft;

  const category = el("select") as HTMLSelectElement;
  category.dataset.qid = q.id;
  category.dataset.part = "category";
  const blank = el("option", "", "(category)") as HTMLOptionElement;
  blank.value = "";
  category.appendChild(blank);
  for (const term of auxVocabularyOf(ctx, q)?.terms ?? []) {
    const option = el("option", "", term.display) as HTMLOptionElement;
    option.value = term.token;
    category.appendChild(option);
  }
  category.value = draft.category ?? "";

  const count = el("input") as HTMLInputElement;
  count.type = "text";
  count.dataset.qid = q.id;
  count.dataset.part = "count";
  count.placeholder = "sample count";
  count.value = draft.count;

  const raw = el("input") as HTMLInputElement;
  raw.type = "text";
  raw.dataset.qid = q.id;
  raw.dataset.part = "raw";
  raw.placeholder = "size as stated by the source";
  raw.value = draft.raw;

  const push = () =>
    engine.setAnswer(q.id, {
      category: category.value || null,
      count: count.value,
      raw: raw.value,
    });
  category.addEventListener("change", push);
  count.addEventListener("input", push);
  raw.addEventListener("input", push);

  box.append(category, count, raw);
  return box;
}

const JUDGE_LABELS: Array<[keyof JudgeDraft, string]> = [
  ["judge_model", "Judge model"],
  ["prompting_strategy", "Prompting strategy"],
  ["temperature", "Temperature"],
  ["agreement", "Agreement"],
];

function buildJudgeWidget(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget judge");
  const draft = engine.draft(q.id) as JudgeDraft;
  const inputs = new Map<keyof JudgeDraft, HTMLInputElement>();
  const push = () => {
    const next = { ...(engine.draft(q.id) as JudgeDraft) };
    for (const [key, input] of inputs) next[key] = input.value;
    engine.setAnswer(q.id, next);
  };
  for (const [key, text] of JUDGE_LABELS) {
    const label = el("label", "field");
    label.appendChild(el("span", "", text));
    const input = el("input") as HTMLInputElement;
    input.type = "text";
    input.dataset.qid = q.id;
    input.dataset.part = key;
    input.value = draft[key];
    input.addEventListener("input", push);
    inputs.set(key, input);
    label.appendChild(input);
    box.appendChild(label);
  }
  return box;
}

function buildTaggedWidget(ctx: Ctx, q: QuestionSpec): HTMLElement {
  const { el, engine } = ctx;
  const box = el("div", "widget tagged");
  const draft = engine.draft(q.id) as TaggedDraft;

  const area = el("textarea") as HTMLTextAreaElement;
  area.dataset.qid = q.id;
  area.value = draft.text;

  const tagBoxes: HTMLInputElement[] = [];
  const push = () => {
    engine.setAnswer(q.id, {
      text: area.value,
      tags: tagBoxes.filter((b) => b.checked).map((b) => b.dataset.token ?? ""),
    });
  };
  area.addEventListener("input", push);
  box.appendChild(area);

  const tags = el("div", "tags");
  for (const term of auxVocabularyOf(ctx, q)?.terms ?? []) {
    if (term.token === OTHER) continue;
    const label = el("label", "checkbox");
    const input = el("input") as HTMLInputElement;
    input.type = "checkbox";
    input.dataset.qid = q.id;
    input.dataset.token = term.token;
    input.checked = draft.tags.includes(term.token);
    input.addEventListener("change", push);
    tagBoxes.push(input);
    label.append(input, el("span", "", term.display));
    tags.appendChild(label);
  }
  box.appendChild(tags);
  return box;
}

function buildExtensionsPanel(ctx: Ctx): HTMLElement {
  const { el, engine } = ctx;
  const panel = el("section", "step extensions inactive");
  panel.appendChild(el("h2", "", "Extensions"));
  panel.appendChild(
    el("p", "hint", "Extra x- fields kept verbatim alongside the questionnaire."),
  );
  const rowsBox = el("div", "extension-rows");
  panel.appendChild(rowsBox);

  const rows: Array<{ key: HTMLInputElement; value: HTMLTextAreaElement }> = [];
  const push = () =>
    engine.setExtensions(
      rows.map((row) => ({ key: row.key.value, value: row.value.value })),
    );

  const addRow = (key: string, value: string) => {
    const row = el("div", "extension-row");
    const keyInput = el("input") as HTMLInputElement;
    keyInput.type = "text";
    keyInput.placeholder = "x-name";
    keyInput.value = key;
    const valueInput = el("textarea") as HTMLTextAreaElement;
    valueInput.value = value;
    keyInput.addEventListener("input", push);
    valueInput.addEventListener("input", push);
    const remove = el("button", "remove", "remove") as HTMLButtonElement;
    remove.type = "button";
    const entry = { key: keyInput, value: valueInput };
    rows.push(entry);
    remove.addEventListener("click", () => {
      rows.splice(rows.indexOf(entry), 1);
      row.remove();
      push();
    });
    row.append(keyInput, valueInput, remove);
    rowsBox.appendChild(row);
  };

  for (const entry of engine.extensions()) addRow(entry.key, entry.value);
  const add = el("button", "add", "add extension") as HTMLButtonElement;
  add.type = "button";
  add.addEventListener("click", () => addRow("", ""));
  panel.appendChild(add);
  return panel;
}

function buildSummary(ctx: Ctx): HTMLElement {
  const { el, engine } = ctx;
  const panel = el("section", "diag-summary");
  panel.appendChild(el("h2", "", "Findings"));
  const list = el("ul", "findings");
  panel.appendChild(list);
  ctx.updaters.push(() => {
    list.textContent = "";
    const diagnostics = engine.serverDiags ?? [];
    if (!diagnostics.length) {
      list.appendChild(el("li", "none", "no findings yet"));
      return;
    }
    for (const diag of diagnostics) {
      const where = diag.question_id ? `${diag.question_id}: ` : "";
      list.appendChild(
        el(
          "li",
          `diagnostic ${diag.severity}`,
          `[${diag.code}] ${where}${diag.message}`,
        ),
      );
    }
  });
  return panel;
}

function buildConflictPrompt(ctx: Ctx): HTMLElement {
  const { el, engine, api } = ctx;
  const box = el("div", "conflict hidden");
  box.appendChild(el("h2", "", "Save conflict"));
  box.appendChild(
    el(
      "p",
      "",
      "Someone else saved this sheet since you loaded it. Keep your answers and overwrite, or load the server copy and drop local changes.",
    ),
  );
  const overwrite = el("button", "overwrite", "Overwrite server") as HTMLButtonElement;
  overwrite.type = "button";
  const adopt = el("button", "adopt", "Load server copy") as HTMLButtonElement;
  adopt.type = "button";
  overwrite.addEventListener("click", () => {
    overwrite.disabled = true;
    engine
      .overwriteServer(api)
      .catch(() => undefined)
      .finally(() => {
        overwrite.disabled = false;
      });
  });
  adopt.addEventListener("click", () => {
    adopt.disabled = true;
    engine
      .adoptServer(api)
      // widgets were built from the old drafts; start over
      .then(() => ctx.rebuild())
      .catch(() => {
        adopt.disabled = false;
      });
  });
  box.append(overwrite, adopt);
  ctx.updaters.push(() => {
    box.classList.toggle("hidden", engine.conflict === null);
  });
  return box;
}
