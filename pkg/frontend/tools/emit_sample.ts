/** Writes the committed sample-annotations fixture from the viz export. */

import { readdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { toJsonl } from "../src/annotate.js";
import type { VizDocument } from "../src/types.js";
import { buildSampleAnnotations } from "./sample.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtureDir = join(here, "..", "..", "tests", "fixtures");
const vizDir = join(fixtureDir, "viz");

const docs = readdirSync(vizDir)
  .filter((name) => name.endsWith(".json"))
  .sort()
  .map(
    (name) =>
      JSON.parse(readFileSync(join(vizDir, name), "utf-8")) as VizDocument,
  );

const { records } = buildSampleAnnotations(docs);
const target = join(fixtureDir, "annotations-sample.jsonl");
writeFileSync(target, toJsonl(records), "utf-8");
console.log(`wrote ${records.length} annotation records to ${target}`);
