import { ApiClient, ApiError } from "./api.js";
import {
  convertAnswer,
  draftFromValue,
  draftTokens,
  emptyDraft,
  type Draft,
  type FlagDraft,
} from "./drafts.js";
import { DraftStorage, type ExtensionEntry } from "./storage.js";
import type {
  CompletenessReport,
  Diagnostic,
  Dimension,
  DimensionBody,
  InterchangeDoc,
  QuestionSpec,
  SchemaDoc,
  StoreEntryBody,
  ValidationResponse,
  VisibleIf,
} from "./types.js";

const EXTENSION_KEY = /^x-[a-z0-9][a-z0-9_-]*$/;
const SHEET_ID = /^[a-z0-9-]{1,64}$/;

/** The date formats the validator accepts without a W-C101 warning. */
export const UNPARSEABLE_DATE = "W-C101";

export class UnknownQuestion extends Error {
  constructor(questionId: string) {
    super(`no such question: ${questionId}`);
    this.name = "UnknownQuestion";
  }
}

export interface LocalIssue {
  question_id: string | null;
  message: string;
}

export interface ConflictInfo {
  sheetId: string;
  localRevision: number | null;
}

export interface EngineOptions {
  storage?: DraftStorage;
}

/**
 * Everything the form knows, independent of any DOM.
 *
 * The engine owns drafts, visibility, payload building, and the last
 * server verdicts.  It never re-implements validation rules: the
 * diagnostics and completeness it exposes are whatever the service
 * last said, plus purely local "this cannot even be sent" issues.
 */
export class FormEngine {
  readonly schema: SchemaDoc;
  readonly sheetId: string;

  activeSection: Dimension;
  dirty = false;
  stale = false;
  revision: number | null = null;
  conflict: ConflictInfo | null = null;
  serverDiags: Diagnostic[] | null = null;
  serverCompleteness: CompletenessReport | null = null;
  /** Bumped whenever drafts or extensions change; lets listeners tell
   * answer edits apart from server-state updates, which also emit. */
  draftVersion = 0;

  private readonly answers: Record<string, Draft> = {};
  private extensionEntries: ExtensionEntry[] = [];
  private readonly byId = new Map<string, QuestionSpec>();
  private readonly storage: DraftStorage | undefined;
  private readonly listeners: Array<() => void> = [];

  constructor(schema: SchemaDoc, sheetId: string, options: EngineOptions = {}) {
    if (!SHEET_ID.test(sheetId)) {
      throw new Error(`not a valid sheet id: ${sheetId}`);
    }
    this.schema = schema;
    this.sheetId = sheetId;
    this.storage = options.storage;
    for (const q of schema.questions) {
      this.byId.set(q.id, q);
      this.answers[q.id] = emptyDraft(q);
    }
    this.activeSection = schema.dimensions[0] ?? "context";
    this.restore();
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      const at = this.listeners.indexOf(listener);
      if (at >= 0) this.listeners.splice(at, 1);
    };
  }

  private emit(): void {
    for (const listener of [...this.listeners]) listener();
  }

  question(questionId: string): QuestionSpec {
    const q = this.byId.get(questionId);
    if (!q) throw new UnknownQuestion(questionId);
    return q;
  }

  draft(questionId: string): Draft {
    this.question(questionId);
    return this.answers[questionId] ?? null;
  }

  setAnswer(questionId: string, draft: Draft): void {
    this.question(questionId);
    this.answers[questionId] = draft;
    this.dirty = true;
    this.draftVersion += 1;
    this.persist();
    this.emit();
  }

  extensions(): ExtensionEntry[] {
    return this.extensionEntries.map((entry) => ({ ...entry }));
  }

  setExtensions(entries: ExtensionEntry[]): void {
    this.extensionEntries = entries.map((entry) => ({ ...entry }));
    this.dirty = true;
    this.draftVersion += 1;
    this.persist();
    this.emit();
  }

  setActiveSection(dimension: Dimension): void {
    this.activeSection = dimension;
    this.emit();
  }

  private predicateHolds(predicate: VisibleIf): boolean {
    const source = this.question(predicate.question);
    const tokens = draftTokens(source, this.draft(source.id));
    return tokens.some((token) => predicate.contains_any.includes(token));
  }

  /**
   * Whether a question's card is shown (and its answer submitted).
   * A flag question's card is its details card: the yes/no toggle is
   * always-available section chrome, and the card opens once the flag
   * is answered either way, because stored sheets carry details for
   * "no" answers too.
   */
  questionVisible(questionId: string): boolean {
    const q = this.question(questionId);
    if (q.visible_if) return this.predicateHolds(q.visible_if);
    if (q.kind === "flag" && q.sub_answer) {
      return (this.draft(questionId) as FlagDraft).value !== null;
    }
    return true;
  }

  visibleQuestionIds(): string[] {
    return this.schema.questions
      .filter((q) => this.questionVisible(q.id))
      .map((q) => q.id);
  }

  /** The interchange document for everything currently visible. */
  payload(): InterchangeDoc {
    const doc: InterchangeDoc = {
      efs_version: this.schema.format_version,
      context: {},
      scope: {},
      structure: {},
      method: {},
      alignment: {},
      extensions: {},
    };
    for (const q of this.schema.questions) {
      if (!this.questionVisible(q.id)) continue;
      const body: DimensionBody = doc[q.dimension];
      const draft = this.draft(q.id);
      if (q.kind === "flag" && q.sub_answer) {
        const flag = draft as FlagDraft;
        if (flag.value === null) continue;
        body[q.field] = flag.value;
        const details = flag.details.replace(/\r\n?/g, "\n").trim();
        if (details) body[q.sub_answer.key] = details;
        continue;
      }
      const { value } = convertAnswer(q, draft);
      if (value !== undefined) body[q.field] = value;
    }
    for (const entry of this.extensionEntries) {
      if (EXTENSION_KEY.test(entry.key)) {
        doc.extensions[entry.key] = entry.value.replace(/\r\n?/g, "\n");
      }
    }
    return doc;
  }

  /** Drafts that cannot become interchange values at all. */
  localIssues(): LocalIssue[] {
    const issues: LocalIssue[] = [];
    for (const q of this.schema.questions) {
      if (!this.questionVisible(q.id)) continue;
      for (const message of convertAnswer(q, this.draft(q.id)).issues) {
        issues.push({ question_id: q.id, message });
      }
    }
    for (const entry of this.extensionEntries) {
      if ((entry.key || entry.value) && !EXTENSION_KEY.test(entry.key)) {
        issues.push({
          question_id: null,
          message: `extension key must match x-[a-z0-9][a-z0-9_-]* (got ${JSON.stringify(entry.key)})`,
        });
      }
    }
    return issues;
  }

  /**
   * What stops an export: drafts that cannot convert, plus a date the
   * validator flagged as unparseable.  Other warnings, and missing
   * mandatory answers, never block a download.
   */
  exportBlockers(): LocalIssue[] {
    const blockers = this.localIssues();
    for (const diag of this.serverDiags ?? []) {
      if (diag.code === UNPARSEABLE_DATE) {
        blockers.push({
          question_id: diag.question_id,
          message: `[${diag.code}] ${diag.message}`,
        });
      }
    }
    return blockers;
  }

  applyValidation(response: ValidationResponse): void {
    this.serverDiags = response.diagnostics;
    this.serverCompleteness = response.completeness;
    this.stale = false;
    this.emit();
  }

  /** Network trouble: keep the last good report, badge it as stale. */
  markStale(): void {
    this.stale = true;
    this.emit();
  }

  diagnosticsFor(questionId: string): Diagnostic[] {
    return (this.serverDiags ?? []).filter(
      (diag) => diag.question_id === questionId,
    );
  }

  /** Replace all drafts with a stored document's answers. */
  loadDocument(doc: InterchangeDoc): void {
    for (const q of this.schema.questions) {
      const body = (doc[q.dimension] ?? {}) as DimensionBody;
      const draft = draftFromValue(q, body[q.field]);
      if (q.kind === "flag" && q.sub_answer) {
        const details = body[q.sub_answer.key];
        (draft as FlagDraft).details =
          typeof details === "string" ? details : "";
      }
      this.answers[q.id] = draft;
    }
    this.extensionEntries = Object.entries(doc.extensions ?? {}).map(
      ([key, value]) => ({ key, value }),
    );
    this.draftVersion += 1;
    this.persist();
    this.emit();
  }

  /**
   * Save to the store.  A fresh form saves create-only (If-Match 0),
   * a loaded one compare-and-swaps on its last seen revision; a 409
   * raises the conflict prompt and rethrows.
   */
  async save(
    api: ApiClient,
    options: { requirePublishable?: boolean } = {},
  ): Promise<StoreEntryBody> {
    try {
      const entry = await api.save(this.sheetId, this.payload(), {
        ifMatch: this.revision ?? 0,
        requirePublishable: options.requirePublishable,
      });
      this.revision = entry.revision;
      this.dirty = false;
      this.conflict = null;
      this.persist();
      this.emit();
      return entry;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.conflict = {
          sheetId: this.sheetId,
          localRevision: this.revision,
        };
        this.emit();
      }
      throw error;
    }
  }

  /** Conflict resolution: keep local drafts, overwrite the server copy. */
  async overwriteServer(api: ApiClient): Promise<StoreEntryBody> {
    let current = 0;
    try {
      current = (await api.load(this.sheetId)).revision;
    } catch (error) {
      if (!(error instanceof ApiError && error.status === 404)) throw error;
    }
    this.revision = current;
    return this.save(api);
  }

  /** Conflict resolution: drop local drafts, adopt the server copy. */
  async adoptServer(api: ApiClient): Promise<void> {
    const entry = await api.load(this.sheetId);
    if (entry.factsheet) this.loadDocument(entry.factsheet);
    this.revision = entry.revision;
    this.dirty = false;
    this.conflict = null;
    this.persist();
    this.emit();
  }

  private persist(): void {
    this.storage?.save({
      answers: this.answers,
      extensions: this.extensionEntries,
      revision: this.revision,
    });
  }

  private restore(): void {
    const snapshot = this.storage?.load();
    if (!snapshot) return;
    for (const [questionId, draft] of Object.entries(snapshot.answers)) {
      if (this.byId.has(questionId)) this.answers[questionId] = draft;
    }
    this.extensionEntries = snapshot.extensions.filter(
      (entry) => typeof entry.key === "string" && typeof entry.value === "string",
    );
    this.revision = snapshot.revision;
  }
}
