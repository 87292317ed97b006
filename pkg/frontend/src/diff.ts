/** Word-level inline diff via longest common subsequence over tokens. */

export interface DiffSegment {
  text: string;
  kind: "same" | "removed" | "added";
}

function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((t) => t.length > 0);
}

function lcsTable(a: string[], b: string[]): number[][] {
  const table: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = 1; i <= a.length; i++) {
    for (let j = 1; j <= b.length; j++) {
      table[i][j] =
        a[i - 1] === b[j - 1]
          ? table[i - 1][j - 1] + 1
          : Math.max(table[i - 1][j], table[i][j - 1]);
    }
  }
  return table;
}

/** Diff two sentences into word runs; adjacent same-kind words merge. */
export function wordDiff(oldText: string, newText: string): DiffSegment[] {
  const a = tokenize(oldText);
  const b = tokenize(newText);
  const table = lcsTable(a, b);
  const raw: DiffSegment[] = [];
  let i = a.length;
  let j = b.length;
  while (i > 0 && j > 0) {
    if (a[i - 1] === b[j - 1]) {
      raw.push({ text: a[i - 1], kind: "same" });
      i--;
      j--;
    } else if (table[i][j - 1] >= table[i - 1][j]) {
      // Ties consume the new side first so removals precede additions
      // once the walk is reversed.
      raw.push({ text: b[j - 1], kind: "added" });
      j--;
    } else {
      raw.push({ text: a[i - 1], kind: "removed" });
      i--;
    }
  }
  while (i > 0) {
    raw.push({ text: a[i - 1], kind: "removed" });
    i--;
  }
  while (j > 0) {
    raw.push({ text: b[j - 1], kind: "added" });
    j--;
  }
  raw.reverse();

  const merged: DiffSegment[] = [];
  for (const segment of raw) {
    const last = merged[merged.length - 1];
    if (last !== undefined && last.kind === segment.kind) {
      last.text += ` ${segment.text}`;
    } else {
      merged.push({ ...segment });
    }
  }
  return merged;
}

/** Words of one side of the diff, joined back together. */
export function joinSide(
  segments: DiffSegment[],
  side: "old" | "new",
): string {
  const keep = side === "old" ? ["same", "removed"] : ["same", "added"];
  return segments
    .filter((s) => keep.includes(s.kind))
    .map((s) => s.text)
    .join(" ");
}
