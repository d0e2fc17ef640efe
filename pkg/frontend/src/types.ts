/** Payload shapes of the knowledge-base HTTP API. */

export interface NameRef {
  id: string;
  name: string | null;
  provisional?: boolean;
}

export interface MatrixPhase {
  id: string;
  name: string;
  order: number;
}

export interface MatrixCell {
  tactic: NameRef;
  techniques: NameRef[];
}

export interface MatrixColumn {
  phase: MatrixPhase;
  cells: MatrixCell[];
  unassigned: NameRef[];
}

export interface MatrixPayload {
  columns: MatrixColumn[];
  orphan_tactics: string[];
}

export interface ManifestPayload {
  corpus_version: string;
  source_digest: string;
  declared: Record<string, number>;
  actual: Record<string, number>;
}

export interface EntityDetail {
  kind: string;
  id: string;
  name: string;
  description: string;
  provisional?: boolean;
  parent?: string;
  order?: number;
  signal_class?: string;
  phase?: NameRef;
  phases?: NameRef[];
  tactics?: NameRef[];
  detections?: NameRef[];
  mitigations?: NameRef[];
  tools?: NameRef[];
  techniques?: NameRef[];
  sub_techniques?: NameRef[];
}

export interface ObservationPayload {
  sequence: number;
  technique: string;
  phase: string;
  observed_behavior: string;
  detection_hits: string[];
  observed_at?: string;
}

export interface IncidentPayload {
  incident_id: string;
  title: string;
  summary: string;
  created_at: string;
  observations: ObservationPayload[];
}

export interface GapPayload {
  technique_id: string;
  reason: "NoMappedDetection" | "NoHitRecorded";
}

export interface CoveragePayload {
  phase_coverage: number;
  phases_hit: string[];
  detection_opportunity: number;
  detection_realized: number;
  gaps: GapPayload[];
}

export interface LayerEntryPayload {
  technique_id: string;
  score: number;
  comment: string;
}

export interface LayerPayload {
  name: string;
  corpus_version: string;
  entries: LayerEntryPayload[];
}

export interface ObservationDraft {
  technique: string;
  phase: string;
  observed_behavior: string;
  detection_hits: string[];
}

export interface IncidentDraft {
  incident_id: string;
  title: string;
  summary?: string;
}
