/** Deterministic sample annotation pass used by tests and emit-sample:
 * labels ten edits across the fixture export, including one incorrect link
 * with its rejected index, the way an annotator session would. */

import { AnnotationSession } from "../src/annotate.js";
import type { AnnotationRecord, VizDocument } from "../src/types.js";
import { editKeyString } from "../src/types.js";

const ANNOTATOR = "sample-annotator";
const ANNOTATED_AT = "2020-05-01T12:00:00Z";

const BY_ACTION: Record<string, string> = {
  edit: "Tonal Edits",
  unchanged: "Unchanged",
  addition: "Delete/Add/Update Background",
  deletion: "Delete/Add/Update Quote",
};

export function buildSampleAnnotations(docs: VizDocument[]): {
  records: AnnotationRecord[];
} {
  const records: AnnotationRecord[] = [];
  let labeled = 0;
  let incorrectDone = false;
  for (const doc of docs) {
    if (labeled >= 10) break;
    const session = new AnnotationSession(doc);
    let touched = 0;
    for (const record of doc.records) {
      if (labeled + touched >= 10) break;
      const key = editKeyString({
        oldIdx: record.old_idx,
        newIdx: record.new_idx,
      });
      if (
        !incorrectDone &&
        record.old_idx !== null &&
        record.new_idx !== null &&
        record.action === "edit"
      ) {
        session.markIncorrectLink(key, (record.new_idx + 1) %
          doc.new.sentences.length);
        incorrectDone = true;
        touched += 1;
        continue;
      }
      session.addLabel(key, BY_ACTION[record.action]);
      touched += 1;
    }
    if (touched > 0) {
      records.push(...session.toRecords(ANNOTATOR, ANNOTATED_AT));
      labeled += touched;
    }
  }
  if (labeled !== 10 || !incorrectDone) {
    throw new Error(
      `fixture walk produced ${labeled} annotations ` +
      `(incorrect link: ${incorrectDone})`,
    );
  }
  return { records };
}
