/** Structural validation of viz documents before rendering.
 *
 * Returns human-readable errors naming the failing path; an empty list means
 * the document is safe to render.
 */

import type { VizDocument } from "./types.js";

const ACTIONS = new Set(["addition", "deletion", "edit", "unchanged"]);
const COARSE = new Set(["Fact", "Style", "Narrative", "Other"]);

function isInt(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

export function validateVizDocument(doc: unknown): string[] {
  const errors: string[] = [];
  const push = (path: string, message: string) =>
    errors.push(`${path}: ${message}`);

  if (typeof doc !== "object" || doc === null) {
    return ["$: document must be an object"];
  }
  const d = doc as Record<string, unknown>;

  if (typeof d.article_id !== "string") push("$.article_id", "expected string");
  if (!isInt(d.old_version)) push("$.old_version", "expected integer");
  if (!isInt(d.new_version)) push("$.new_version", "expected integer");

  const sides: Array<["old" | "new", unknown]> = [
    ["old", d.old],
    ["new", d.new],
  ];
  const sentenceCounts: Record<"old" | "new", number> = { old: -1, new: -1 };
  for (const [name, side] of sides) {
    if (typeof side !== "object" || side === null) {
      push(`$.${name}`, "expected object");
      continue;
    }
    const block = side as Record<string, unknown>;
    if (!isInt(block.version)) push(`$.${name}.version`, "expected integer");
    if (typeof block.timestamp !== "string")
      push(`$.${name}.timestamp`, "expected string");
    if (!Array.isArray(block.sentences)) {
      push(`$.${name}.sentences`, "expected array");
    } else {
      sentenceCounts[name] = block.sentences.length;
      block.sentences.forEach((s, k) => {
        if (typeof s !== "string")
          push(`$.${name}.sentences[${k}]`, "expected string");
      });
    }
  }
  const n = sentenceCounts.old;
  const m = sentenceCounts.new;

  if (!Array.isArray(d.links)) {
    push("$.links", "expected array");
  } else {
    d.links.forEach((link, k) => {
      if (!Array.isArray(link) || link.length !== 3) {
        push(`$.links[${k}]`, "expected [i, j, score]");
        return;
      }
      const [i, j, score] = link;
      if (!isInt(i) || (n >= 0 && (i < 0 || i >= n)))
        push(`$.links[${k}][0]`, `old index ${i} out of range`);
      if (!isInt(j) || (m >= 0 && (j < 0 || j >= m)))
        push(`$.links[${k}][1]`, `new index ${j} out of range`);
      if (typeof score !== "number" || score < 0 || score > 1)
        push(`$.links[${k}][2]`, `score ${score} not in [0, 1]`);
    });
  }

  checkIndexArray(d.additions, m, "$.additions", push);
  checkIndexArray(d.deletions, n, "$.deletions", push);

  if (!Array.isArray(d.records)) {
    push("$.records", "expected array");
  } else {
    d.records.forEach((rec, k) => {
      if (typeof rec !== "object" || rec === null) {
        push(`$.records[${k}]`, "expected object");
        return;
      }
      const r = rec as Record<string, unknown>;
      if (typeof r.action !== "string" || !ACTIONS.has(r.action))
        push(`$.records[${k}].action`, `unknown action ${String(r.action)}`);
      if (!Array.isArray(r.labels))
        push(`$.records[${k}].labels`, "expected array");
    });
  }

  const tax = d.taxonomy as Record<string, unknown> | null;
  if (typeof tax !== "object" || tax === null) {
    push("$.taxonomy", "expected object");
  } else if (!Array.isArray(tax.labels) || tax.labels.length !== 20) {
    push("$.taxonomy.labels", "expected exactly 20 labels");
  } else {
    (tax.labels as Array<Record<string, unknown>>).forEach((label, k) => {
      if (typeof label.display !== "string")
        push(`$.taxonomy.labels[${k}].display`, "expected string");
      if (typeof label.coarse !== "string" || !COARSE.has(label.coarse))
        push(`$.taxonomy.labels[${k}].coarse`, "unknown coarse category");
    });
  }

  return errors;
}

function checkIndexArray(
  value: unknown,
  bound: number,
  path: string,
  push: (path: string, message: string) => void,
): void {
  if (!Array.isArray(value)) {
    push(path, "expected array");
    return;
  }
  value.forEach((idx, k) => {
    if (!isInt(idx) || (bound >= 0 && (idx < 0 || idx >= bound)))
      push(`${path}[${k}]`, `index ${idx} out of range`);
  });
}

export function assertValid(doc: unknown): VizDocument {
  const errors = validateVizDocument(doc);
  if (errors.length > 0) {
    throw new Error(`invalid document:\n${errors.join("\n")}`);
  }
  return doc as VizDocument;
}
