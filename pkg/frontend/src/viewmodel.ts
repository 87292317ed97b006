/** Pure document -> view model transformation for the two-column layout.
 *
 * The DOM layer binds this without further logic, which keeps everything
 * about cells, link lines, and edit ordering testable without a browser.
 */

import { wordDiff, type DiffSegment } from "./diff.js";
import type { ActionKind, EditRecordJson, VizDocument } from "./types.js";
import { editKeyString } from "./types.js";

export interface Cell {
  side: "old" | "new";
  index: number;
  text: string;
  action: ActionKind;
  moved: boolean;
  indexDelta: number | null;
  editKey: string;
  score: number | null;
  diff: DiffSegment[] | null; // inline word diff, edits only
  labels: string[];
}

export interface LinkLine {
  oldIndex: number;
  newIndex: number;
  score: number;
  action: ActionKind;
  moved: boolean;
  editKey: string;
}

export interface ViewModel {
  articleId: string;
  oldCells: Cell[];
  newCells: Cell[];
  lines: LinkLine[];
  /** Edit keys in keyboard-navigation order: new-document order, then
   * deletions by old index. */
  editOrder: string[];
  recordsByKey: Map<string, EditRecordJson>;
}

export function buildViewModel(doc: VizDocument): ViewModel {
  const recordsByKey = new Map<string, EditRecordJson>();
  for (const record of doc.records) {
    recordsByKey.set(
      editKeyString({ oldIdx: record.old_idx, newIdx: record.new_idx }),
      record,
    );
  }

  const linkByOld = new Map<number, [number, number, number]>();
  const linkByNew = new Map<number, [number, number, number]>();
  for (const link of doc.links) {
    linkByOld.set(link[0], link);
    linkByNew.set(link[1], link);
  }

  const keyOf = (oldIdx: number | null, newIdx: number | null): string =>
    editKeyString({ oldIdx, newIdx });

  const describe = (
    oldIdx: number | null,
    newIdx: number | null,
    fallback: ActionKind,
  ): { action: ActionKind; moved: boolean; delta: number | null;
       labels: string[]; score: number | null } => {
    const record = recordsByKey.get(keyOf(oldIdx, newIdx));
    if (record === undefined) {
      return { action: fallback, moved: false, delta: null, labels: [],
               score: null };
    }
    const delta =
      record.moved && record.old_idx !== null && record.new_idx !== null
        ? record.new_idx - record.old_idx
        : null;
    return {
      action: record.action,
      moved: record.moved,
      delta,
      labels: record.labels,
      score: record.score,
    };
  };

  const oldCells: Cell[] = doc.old.sentences.map((text, index) => {
    const link = linkByOld.get(index);
    const newIdx = link ? link[1] : null;
    const fallback: ActionKind = link ? "edit" : "deletion";
    const info = describe(index, newIdx, fallback);
    const diff =
      link && info.action === "edit"
        ? wordDiff(text, doc.new.sentences[link[1]])
        : null;
    return {
      side: "old",
      index,
      text,
      action: info.action,
      moved: info.moved,
      indexDelta: info.delta,
      editKey: keyOf(index, newIdx),
      score: link ? link[2] : null,
      diff,
      labels: info.labels,
    };
  });

  const newCells: Cell[] = doc.new.sentences.map((text, index) => {
    const link = linkByNew.get(index);
    const oldIdx = link ? link[0] : null;
    const fallback: ActionKind = link ? "edit" : "addition";
    const info = describe(oldIdx, index, fallback);
    const diff =
      link && info.action === "edit"
        ? wordDiff(doc.old.sentences[link[0]], text)
        : null;
    return {
      side: "new",
      index,
      text,
      action: info.action,
      moved: info.moved,
      indexDelta: info.delta,
      editKey: keyOf(oldIdx, index),
      score: link ? link[2] : null,
      diff,
      labels: info.labels,
    };
  });

  const lines: LinkLine[] = doc.links.map((link) => {
    const info = describe(link[0], link[1], "edit");
    return {
      oldIndex: link[0],
      newIndex: link[1],
      score: link[2],
      action: info.action,
      moved: info.moved,
      editKey: keyOf(link[0], link[1]),
    };
  });

  const editOrder: string[] = [];
  for (const cell of newCells) {
    editOrder.push(cell.editKey);
  }
  for (const index of [...doc.deletions].sort((a, b) => a - b)) {
    editOrder.push(keyOf(index, null));
  }

  return {
    articleId: doc.article_id,
    oldCells,
    newCells,
    lines,
    editOrder,
    recordsByKey,
  };
}
