/** Draft answers as the widgets hold them.
 *
 * Drafts are looser than wire values: numbers stay strings while the
 * user types, unanswered is explicit, and nothing is rejected on
 * input.  Conversion to an interchange value happens all at once when
 * a payload is built, reporting anything unconvertible as an issue
 * bound to its question.
 */

import type {
  AnswerValue,
  JudgeDetailsValue,
  QuestionSpec,
  SizeValue,
  SplitValue,
  TermValue,
} from "./types.js";

export interface TermDraft {
  token: string;
  /** Free text carried by the "other" escape token; ignored otherwise. */
  raw: string;
}

export interface FlagDraft {
  value: boolean | null;
  details: string;
}

export interface SizeDraft {
  category: string | null;
  count: string;
  raw: string;
}

export interface JudgeDraft {
  judge_model: string;
  prompting_strategy: string;
  temperature: string;
  agreement: string;
}

export interface TaggedDraft {
  text: string;
  tags: string[];
}

export interface SplitDraft {
  kind: string;
  description: string;
}

export type Draft =
  | string
  | string[]
  | TermDraft
  | TermDraft[]
  | FlagDraft
  | SizeDraft
  | JudgeDraft
  | TaggedDraft
  | SplitDraft[]
  | null;

export const OTHER = "other";

/** The interchange format defines three structured value shapes. */
export type StructuredShape = "size" | "judge" | "tagged";

export function structuredShape(q: QuestionSpec): StructuredShape {
  if (q.field === "size") return "size";
  if (q.field === "judge_details") return "judge";
  return "tagged";
}

export function emptyDraft(q: QuestionSpec): Draft {
  switch (q.kind) {
    case "text":
    case "long_text":
    case "url":
    case "date":
      return "";
    case "flag":
      return { value: null, details: "" };
    case "enum_one":
      return null;
    case "enum_many":
      return [];
    case "text_list":
    case "step_list":
      return [];
    case "split_list":
      return [];
    case "structured":
      switch (structuredShape(q)) {
        case "size":
          return { category: null, count: "", raw: "" };
        case "judge":
          return {
            judge_model: "",
            prompting_strategy: "",
            temperature: "",
            agreement: "",
          };
        case "tagged":
          return { text: "", tags: [] };
      }
  }
}

/** Tokens a draft contributes to visibility predicates. */
export function draftTokens(q: QuestionSpec, draft: Draft): string[] {
  switch (q.kind) {
    case "enum_one": {
      const term = draft as TermDraft | null;
      return term ? [term.token] : [];
    }
    case "enum_many":
      return (draft as TermDraft[]).map((term) => term.token);
    case "flag": {
      const flag = draft as FlagDraft;
      return flag.value === null ? [] : [String(flag.value)];
    }
    default:
      return [];
  }
}

export interface Conversion {
  value?: AnswerValue;
  issues: string[];
}

const NONE: Conversion = { issues: [] };

function cleanText(text: string): string {
  return text.replace(/\r\n?/g, "\n");
}

function singleLine(text: string): string {
  return cleanText(text).replace(/\s*\n\s*/g, " ").trim();
}

function termValue(draft: TermDraft, issues: string[]): TermValue | null {
  if (draft.token !== OTHER) {
    return { token: draft.token };
  }
  const raw = singleLine(draft.raw);
  if (!raw) {
    issues.push('"Other" needs a short description');
    return null;
  }
  return { token: OTHER, raw };
}

/**
 * Turn one draft into its interchange value.  A missing `value` with
 * no issues means the question is simply unanswered.  Flag details
 * travel separately (see FormEngine.payload), so a flag converts to
 * just its boolean.
 */
export function convertAnswer(q: QuestionSpec, draft: Draft): Conversion {
  switch (q.kind) {
    case "text":
    case "url":
    case "date": {
      const value = singleLine(draft as string);
      return value ? { value, issues: [] } : NONE;
    }
    case "long_text": {
      const value = cleanText(draft as string).trim();
      return value ? { value, issues: [] } : NONE;
    }
    case "flag": {
      const flag = draft as FlagDraft;
      return flag.value === null ? NONE : { value: flag.value, issues: [] };
    }
    case "enum_one": {
      const term = draft as TermDraft | null;
      if (!term) return NONE;
      const issues: string[] = [];
      const value = termValue(term, issues);
      return value ? { value, issues } : { issues };
    }
    case "enum_many": {
      const issues: string[] = [];
      const values: TermValue[] = [];
      for (const term of draft as TermDraft[]) {
        const value = termValue(term, issues);
        if (value) values.push(value);
      }
      return values.length ? { value: values, issues } : { issues };
    }
    case "text_list":
    case "step_list": {
      const items = (draft as string[])
        .map(singleLine)
        .filter((item) => item !== "");
      return items.length ? { value: items, issues: [] } : NONE;
    }
    case "split_list": {
      const issues: string[] = [];
      const values: SplitValue[] = [];
      for (const row of draft as SplitDraft[]) {
        const description = singleLine(row.description);
        if (!row.kind && !description) continue;
        if (!row.kind) {
          issues.push("split needs a kind");
          continue;
        }
        if (!description) {
          issues.push(`${row.kind} split needs a description`);
          continue;
        }
        values.push({ kind: row.kind, description });
      }
      return values.length ? { value: values, issues } : { issues };
    }
    case "structured":
      switch (structuredShape(q)) {
        case "size":
          return convertSize(draft as SizeDraft);
        case "judge":
          return convertJudge(draft as JudgeDraft);
        case "tagged":
          return convertTagged(draft as TaggedDraft);
      }
  }
}

function convertSize(draft: SizeDraft): Conversion {
  const count = draft.count.replace(/[,_\s]/g, "");
  const raw = cleanText(draft.raw).trim();
  if (!draft.category && !count && !raw) return NONE;
  if (!draft.category) {
    return { issues: ["size needs a category"] };
  }
  if (count && !/^\d+$/.test(count)) {
    return { issues: ["size count must be a whole number"] };
  }
  const value: SizeValue = {
    category: draft.category,
    count: count ? Number(count) : null,
  };
  if (raw) value.raw = raw;
  return { value, issues: [] };
}

function convertJudge(draft: JudgeDraft): Conversion {
  const value: JudgeDetailsValue = {};
  for (const key of [
    "judge_model",
    "prompting_strategy",
    "temperature",
    "agreement",
  ] as const) {
    const text = singleLine(draft[key]);
    if (text) value[key] = text;
  }
  return Object.keys(value).length ? { value, issues: [] } : NONE;
}

function convertTagged(draft: TaggedDraft): Conversion {
  const text = cleanText(draft.text).trim();
  if (!text && draft.tags.length === 0) return NONE;
  return { value: { text, tags: [...draft.tags] }, issues: [] };
}

/** Rebuild a draft from a stored interchange value (inverse of convertAnswer). */
export function draftFromValue(
  q: QuestionSpec,
  value: AnswerValue | undefined | null,
): Draft {
  if (value === undefined || value === null) return emptyDraft(q);
  switch (q.kind) {
    case "text":
    case "long_text":
    case "url":
    case "date":
      return value as string;
    case "flag":
      return { value: value as boolean, details: "" };
    case "enum_one": {
      const term = value as TermValue;
      return { token: term.token, raw: term.raw ?? "" };
    }
    case "enum_many":
      return (value as TermValue[]).map((term) => ({
        token: term.token,
        raw: term.raw ?? "",
      }));
    case "text_list":
    case "step_list":
      return [...(value as string[])];
    case "split_list":
      return (value as SplitValue[]).map((row) => ({
        kind: row.kind,
        description: row.description,
      }));
    case "structured":
      switch (structuredShape(q)) {
        case "size": {
          const size = value as { category: string; count: number | null; raw?: string };
          return {
            category: size.category,
            count: size.count === null || size.count === undefined
              ? ""
              : String(size.count),
            raw: size.raw ?? "",
          };
        }
        case "judge": {
          const details = value as JudgeDetailsValue;
          return {
            judge_model: details.judge_model ?? "",
            prompting_strategy: details.prompting_strategy ?? "",
            temperature: details.temperature ?? "",
            agreement: details.agreement ?? "",
          };
        }
        case "tagged": {
          const tagged = value as { text?: string; tags?: string[] };
          return { text: tagged.text ?? "", tags: [...(tagged.tags ?? [])] };
        }
      }
  }
}
