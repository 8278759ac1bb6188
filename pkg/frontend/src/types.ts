/** Wire types for the factsheet service under /api/v1. */

export type Dimension =
  | "context"
  | "scope"
  | "structure"
  | "method"
  | "alignment";

export type AnswerKind =
  | "text"
  | "long_text"
  | "url"
  | "date"
  | "flag"
  | "enum_one"
  | "enum_many"
  | "text_list"
  | "step_list"
  | "split_list"
  | "structured";

export interface VisibleIf {
  question: string;
  contains_any: string[];
}

export interface SubAnswerSpec {
  key: string;
  prompt: string;
  visible_if: VisibleIf | null;
}

export interface QuestionSpec {
  id: string;
  dimension: Dimension;
  section: string;
  field: string;
  prompt: string;
  kind: AnswerKind;
  mandatory: boolean;
  vocabulary: string | null;
  /** Token set embedded in a compound answer shape (size category,
   * split kind, tag list); null when the shape carries none. */
  aux_vocabulary: string | null;
  visible_if: VisibleIf | null;
  sub_answer: SubAnswerSpec | null;
}

export interface VocabTermSpec {
  token: string;
  display: string;
}

export interface VocabularySpec {
  open: boolean;
  terms: VocabTermSpec[];
}

export interface SchemaDoc {
  format_version: string;
  dimensions: Dimension[];
  sections: Record<Dimension, string>;
  questions: QuestionSpec[];
  vocabularies: Record<string, VocabularySpec>;
}

export type Severity = "error" | "warning" | "note";

export interface SourceSpan {
  line: number;
  column: number;
}

export interface Diagnostic {
  code: string;
  severity: Severity;
  message: string;
  question_id: string | null;
  span: SourceSpan | null;
}

export interface DimensionScore {
  dimension: Dimension;
  answered: number;
  applicable: number;
  ratio: number;
}

export interface CompletenessReport {
  overall: number;
  dimensions: DimensionScore[];
}

export interface ValidationResponse {
  diagnostics: Diagnostic[];
  completeness: CompletenessReport;
  publishable: boolean;
}

/* Interchange documents: the JSON factsheet body the service accepts
 * and returns.  Absent keys read as unanswered, so payload builders
 * only ever add keys for present answers. */

export interface TermValue {
  token: string;
  raw?: string;
}

export interface SizeValue {
  category: string;
  count: number | null;
  raw?: string;
}

export interface SplitValue {
  kind: string;
  description: string;
}

export interface JudgeDetailsValue {
  judge_model?: string;
  prompting_strategy?: string;
  temperature?: string;
  agreement?: string;
}

export interface TaggedValue {
  text: string;
  tags: string[];
}

export type AnswerValue =
  | string
  | boolean
  | string[]
  | TermValue
  | TermValue[]
  | SizeValue
  | SplitValue[]
  | JudgeDetailsValue
  | TaggedValue;

export type DimensionBody = Record<string, AnswerValue>;

export interface InterchangeDoc {
  efs_version: string;
  context: DimensionBody;
  scope: DimensionBody;
  structure: DimensionBody;
  method: DimensionBody;
  alignment: DimensionBody;
  extensions: Record<string, string>;
}

export interface StoreEntryBody {
  id: string;
  revision: number;
  updated_at: string;
  factsheet?: InterchangeDoc;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  span?: SourceSpan | null;
}
