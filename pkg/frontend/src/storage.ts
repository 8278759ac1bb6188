import type { Draft } from "./drafts.js";

/** The subset of window.localStorage the form needs; injectable for tests. */
export interface StringStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface ExtensionEntry {
  key: string;
  value: string;
}

export interface DraftSnapshot {
  answers: Record<string, Draft>;
  extensions: ExtensionEntry[];
  revision: number | null;
}

/** Draft persistence keyed by sheet id, so half-finished questionnaires
 * survive navigation.  Unreadable snapshots are treated as absent. */
export class DraftStorage {
  constructor(
    private readonly backend: StringStore,
    private readonly sheetId: string,
  ) {}

  private get key(): string {
    return `efs-draft:${this.sheetId}`;
  }

  load(): DraftSnapshot | null {
    const raw = this.backend.getItem(this.key);
    if (raw === null) return null;
    try {
      const parsed = JSON.parse(raw) as DraftSnapshot;
      if (typeof parsed !== "object" || parsed === null) return null;
      return {
        answers: parsed.answers ?? {},
        extensions: Array.isArray(parsed.extensions) ? parsed.extensions : [],
        revision: typeof parsed.revision === "number" ? parsed.revision : null,
      };
    } catch {
      return null;
    }
  }

  save(snapshot: DraftSnapshot): void {
    this.backend.setItem(this.key, JSON.stringify(snapshot));
  }

  clear(): void {
    this.backend.removeItem(this.key);
  }
}

export class MemoryStore implements StringStore {
  private readonly map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}
