/** JSON documents exchanged with the vtkb HTTP service, mirrored 1:1. */

export type AnchorSlot =
  | "Volume"
  | "Surface"
  | "TopOfObject"
  | "SideOfObject"
  | "Overlay";

export type Geolocation =
  | { kind: "Coordinates2D"; x: number; y: number }
  | { kind: "Coordinates3D"; x: number; y: number; z: number }
  | { kind: "GeoName"; name: string }
  | { kind: "ObjectAnchored"; object: string };

export interface DataItemDoc {
  id: string;
  data_type: string;
  geolocation: Geolocation;
  issue: string;
  format?: string;
  urban_object?: string;
}

export interface SceneDoc {
  data_items: DataItemDoc[];
  task: string;
  context: string;
  active_rules?: string[];
}

/** One technique-to-item assignment inside a plan sent to /check. */
export interface PlacementDoc {
  data: string;
  technique: string;
  slot?: AnchorSlot;
}

export interface OutputLocationDoc {
  space: string;
  dimensionality: string;
  anchor_slot: AnchorSlot;
}

export interface TechniqueDoc {
  id: string;
  accepted_data_type: string;
  applicable_issues: string[];
  output_location: OutputLocationDoc;
  visual_attributes: Record<string, string | number | boolean>;
  visualization_abstraction?: string;
  reference?: string;
  example?: string;
}

export interface RuleSummaryDoc {
  id: string;
  severity: "forbid" | "warn";
}

export interface ViolationDoc {
  location: string;
  kind: string;
  message: string;
}

export interface SummaryDoc {
  violations: ViolationDoc[];
  concept_count: number;
  individual_count: number;
  data_types: string[];
  issues: string[];
  urban_objects: string[];
  techniques: string[];
  tasks: string[];
  contexts: string[];
  rules: RuleSummaryDoc[];
}

export interface MatchCriterionDoc {
  criterion: string;
  passed: boolean;
  explanation: string;
}

export interface MatchReportDoc {
  technique: string;
  verdict: string;
  criteria: MatchCriterionDoc[];
}

export interface MatchResponse {
  candidates: string[];
  reports: MatchReportDoc[];
}

export interface ScoredPlacementDoc {
  data: string;
  technique: string;
  slot: AnchorSlot;
  usability: number;
  source: "Exact" | "TaskOnly" | "Generic" | "Default";
}

export interface RankedPlanDoc {
  score: number;
  placements: ScoredPlacementDoc[];
  warnings: string[];
}

export interface RecommendResponse {
  plans: RankedPlanDoc[];
}

export interface ConflictPlacementDoc {
  data: string;
  technique: string;
  slot: AnchorSlot;
}

export interface ConflictDoc {
  rule: string;
  severity: "forbid" | "warn";
  placements: [ConflictPlacementDoc, ConflictPlacementDoc];
  message: string;
}

export interface CheckResponse {
  valid: boolean;
  conflicts: ConflictDoc[];
  score: number;
}

/** Error payloads the service returns with non-2xx statuses. */
export interface ServiceErrorPayload {
  error: string;
  message: string;
  line?: number;
  column?: number;
  expected?: string[];
  data?: string;
}
