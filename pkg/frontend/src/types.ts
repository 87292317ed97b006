/** Shapes shared with the pipeline's export/annotation file formats. */

export interface VersionBlock {
  version: number;
  timestamp: string;
  sentences: string[];
}

export type ActionKind = "addition" | "deletion" | "edit" | "unchanged";

export interface EditRecordJson {
  article_id: string;
  old_version: number;
  new_version: number;
  old_idx: number | null;
  new_idx: number | null;
  action: ActionKind;
  moved: boolean;
  score: number | null;
  labels: string[];
  label_source: string;
  rejected_index?: number;
}

export interface TaxonomyLabel {
  id: string;
  display: string;
  coarse: "Fact" | "Style" | "Narrative" | "Other";
  definition: string;
}

export interface TaxonomyManifest {
  version: number;
  delimiter?: string;
  coarse: string[];
  labels: TaxonomyLabel[];
}

export interface VizDocument {
  article_id: string;
  old_version: number;
  new_version: number;
  old: VersionBlock;
  new: VersionBlock;
  links: [number, number, number][];
  additions: number[];
  deletions: number[];
  records: EditRecordJson[];
  taxonomy: TaxonomyManifest;
}

/** One annotated edit, as persisted to JSONL for the pipeline. */
export interface AnnotationRecord extends EditRecordJson {
  annotator_id: string;
  annotated_at: string;
}

/** Stable identity of one edit within a document. */
export interface EditKey {
  oldIdx: number | null;
  newIdx: number | null;
}

export function editKeyString(key: EditKey): string {
  return `${key.oldIdx ?? "-"}:${key.newIdx ?? "-"}`;
}
