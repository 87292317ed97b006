import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";

import type { VizDocument } from "../src/types.js";

const FIXTURE_DIR = join(__dirname, "fixtures", "viz");

export function fixtureDocs(): VizDocument[] {
  return readdirSync(FIXTURE_DIR)
    .filter((name) => name.endsWith(".json"))
    .sort()
    .map(
      (name) =>
        JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf-8")) as
          VizDocument,
    );
}
