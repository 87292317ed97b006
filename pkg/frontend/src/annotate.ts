/** Annotation session state: per-edit label selections and their export.
 *
 * Labels always come from the document's embedded taxonomy manifest; the
 * state never stores a string outside it. Incorrect-link selections carry
 * the index of the wrongly linked sentence in the other version.
 */

import type {
  AnnotationRecord,
  EditRecordJson,
  TaxonomyManifest,
  VizDocument,
} from "./types.js";
import { editKeyString } from "./types.js";

export const INCORRECT_LINK_DISPLAY = "Incorrect Link";

export interface Selection {
  labels: string[];
  rejectedIndex: number | null;
}

export class AnnotationSession {
  private readonly doc: VizDocument;
  private readonly allowed: Set<string>;
  private readonly selections = new Map<string, Selection>();

  constructor(doc: VizDocument) {
    this.doc = doc;
    this.allowed = new Set(doc.taxonomy.labels.map((l) => l.display));
  }

  manifest(): TaxonomyManifest {
    return this.doc.taxonomy;
  }

  selection(editKey: string): Selection {
    return (
      this.selections.get(editKey) ?? { labels: [], rejectedIndex: null }
    );
  }

  selectedKeys(): string[] {
    return [...this.selections.keys()];
  }

  /** Add one more intention to the edit (the "+" action). */
  addLabel(editKey: string, display: string): void {
    if (!this.allowed.has(display)) {
      throw new Error(`label ${display} is not in the taxonomy manifest`);
    }
    this.requireEdit(editKey);
    const current = this.selection(editKey);
    if (!current.labels.includes(display)) {
      this.selections.set(editKey, {
        ...current,
        labels: [...current.labels, display],
      });
    }
  }

  removeLabel(editKey: string, display: string): void {
    const current = this.selection(editKey);
    const labels = current.labels.filter((l) => l !== display);
    const rejectedIndex =
      display === INCORRECT_LINK_DISPLAY ? null : current.rejectedIndex;
    this.selections.set(editKey, { labels, rejectedIndex });
  }

  /** Mark the link as wrong, naming the sentence it must not link to. */
  markIncorrectLink(editKey: string, rejectedIndex: number): void {
    const record = this.requireEdit(editKey);
    if (record.old_idx === null || record.new_idx === null) {
      throw new Error("incorrect link applies only to linked sentences");
    }
    const bound =
      record.old_idx !== null
        ? this.doc.new.sentences.length
        : this.doc.old.sentences.length;
    if (rejectedIndex < 0 || rejectedIndex >= bound) {
      throw new Error(`rejected index ${rejectedIndex} out of range`);
    }
    this.addLabel(editKey, INCORRECT_LINK_DISPLAY);
    const current = this.selection(editKey);
    this.selections.set(editKey, { ...current, rejectedIndex });
  }

  private requireEdit(editKey: string): EditRecordJson {
    const record = this.doc.records.find(
      (r) =>
        editKeyString({ oldIdx: r.old_idx, newIdx: r.new_idx }) === editKey,
    );
    if (record === undefined) {
      throw new Error(`no edit with key ${editKey} in this document`);
    }
    return record;
  }

  /** Problems that block saving; empty means good to save. */
  saveBlockers(): string[] {
    const blockers: string[] = [];
    for (const [key, selection] of this.selections) {
      if (selection.labels.length === 0) {
        blockers.push(`edit ${key}: empty label selection`);
      }
      if (
        selection.labels.includes(INCORRECT_LINK_DISPLAY) &&
        selection.rejectedIndex === null
      ) {
        blockers.push(`edit ${key}: incorrect link needs a rejected index`);
      }
    }
    return blockers;
  }

  toRecords(annotatorId: string, annotatedAt: string): AnnotationRecord[] {
    const blockers = this.saveBlockers();
    if (blockers.length > 0) {
      throw new Error(`cannot save:\n${blockers.join("\n")}`);
    }
    const records: AnnotationRecord[] = [];
    for (const [key, selection] of this.selections) {
      const base = this.requireEdit(key);
      const record: AnnotationRecord = {
        article_id: base.article_id,
        old_version: base.old_version,
        new_version: base.new_version,
        old_idx: base.old_idx,
        new_idx: base.new_idx,
        action: base.action,
        moved: base.moved,
        score: base.score,
        labels: [...selection.labels],
        label_source: "gold",
        annotator_id: annotatorId,
        annotated_at: annotatedAt,
      };
      if (selection.rejectedIndex !== null) {
        record.rejected_index = selection.rejectedIndex;
      }
      records.push(record);
    }
    return records;
  }

  /** Restore selection state from previously saved records. */
  loadRecords(records: AnnotationRecord[]): void {
    for (const record of records) {
      const key = editKeyString({
        oldIdx: record.old_idx,
        newIdx: record.new_idx,
      });
      for (const label of record.labels) {
        this.addLabel(key, label);
      }
      if (record.rejected_index !== undefined) {
        const current = this.selection(key);
        this.selections.set(key, {
          ...current,
          rejectedIndex: record.rejected_index,
        });
      }
    }
  }
}

export function toJsonl(records: AnnotationRecord[]): string {
  return records.map((record) => JSON.stringify(record)).join("\n") + "\n";
}

export function parseJsonl(text: string): AnnotationRecord[] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as AnnotationRecord);
}

export async function postAnnotations(
  serverBase: string,
  annotatorId: string,
  records: AnnotationRecord[],
): Promise<number> {
  const response = await fetch(`${serverBase}/annotations`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ annotator_id: annotatorId, records }),
  });
  if (!response.ok) {
    throw new Error(`server rejected annotations: ${response.status}`);
  }
  const body = (await response.json()) as { saved: number };
  return body.saved;
}
