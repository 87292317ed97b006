import { describe, expect, it } from "vitest";

import { validateVizDocument } from "../src/schema.js";
import { fixtureDocs } from "./helpers.js";

describe("validateVizDocument", () => {
  it("accepts every exported fixture document", () => {
    const docs = fixtureDocs();
    expect(docs.length).toBe(20);
    for (const doc of docs) {
      expect(validateVizDocument(doc)).toEqual([]);
    }
  });

  it("names the failing path for an out-of-range link", () => {
    const doc = structuredClone(fixtureDocs()[0]);
    doc.links[0][0] = 999;
    const errors = validateVizDocument(doc);
    expect(errors.some((e) => e.startsWith("$.links[0][0]"))).toBe(true);
  });

  it("names the failing path for a bad action", () => {
    const doc = structuredClone(fixtureDocs()[0]) as unknown as {
      records: { action: string }[];
    };
    doc.records[0].action = "exploded";
    const errors = validateVizDocument(doc);
    expect(errors.some((e) => e.includes("records[0].action"))).toBe(true);
  });

  it("requires the full 20-label taxonomy", () => {
    const doc = structuredClone(fixtureDocs()[0]);
    doc.taxonomy.labels = doc.taxonomy.labels.slice(0, 5);
    const errors = validateVizDocument(doc);
    expect(errors.some((e) => e.startsWith("$.taxonomy.labels"))).toBe(true);
  });

  it("rejects non-objects outright", () => {
    expect(validateVizDocument(null)).toHaveLength(1);
    expect(validateVizDocument("nope")).toHaveLength(1);
  });
});
