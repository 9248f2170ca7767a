/** Wire types for the dashboard API. Field names mirror the server contract. */

export interface KpisWire {
  min_score: number | null;
  max_score: number | null;
  median_score: number | null;
  mean_score: number | null;
  completed_count: number;
  active_students: number;
  events_seen: number;
  version: number;
}

export type QuestionStatus = "unattempted" | "correct" | "incorrect";

export interface QuestionProgressWire {
  question_id: string;
  status: QuestionStatus;
  hints: number;
}

export interface ProgressRowWire {
  student_id: string;
  name: string;
  score: number | null;
  answered: number;
  completed: boolean;
  total_hints: number;
  questions: QuestionProgressWire[];
}

export interface KcTotalsWire {
  id: string;
  name: string;
  incorrect_total: number;
  hints_total: number;
}

export interface HistogramWire {
  bin_width: number;
  bins: number[];
  edges: number[];
}

export interface LeafWire {
  id: number;
  label: string;
}

export interface InternalWire {
  height: number;
  children: TreeNodeWire[];
}

export type TreeNodeWire = LeafWire | InternalWire;

export function isLeaf(node: TreeNodeWire): node is LeafWire {
  return (node as LeafWire).id !== undefined && !("children" in node);
}

export interface DendrogramWire {
  n: number;
  merges: Array<[number, number, number, number]>;
  tree: TreeNodeWire;
  linkage: string;
  ac: number;
}

export interface AssignmentWire {
  k: number;
  labels: string[];
  member_of: number[];
}

export interface ClusterWire {
  index: number;
  members: string[];
  names: string[];
  incorrect_by_kc: Record<string, number>;
  hints_by_kc: Record<string, number>;
}

export interface ClusteringWire {
  available: boolean;
  reason: string | null;
  acs?: Record<string, number>;
  selected?: string;
  k?: number;
  k_policy?: string;
  k_flagged?: boolean;
  dendrogram?: DendrogramWire;
  assignment?: AssignmentWire;
  clusters?: ClusterWire[];
}

export interface AlertWire {
  rule: string;
  kind: string;
  severity: "info" | "warning";
  subject_type: string;
  subject: string;
  message: string;
  first_seen: number;
  last_seen: number;
}

export interface RecommendationWire {
  cluster: number;
  members: string[];
  dominant_incorrect_kc: string | null;
  dominant_hint_kc: string | null;
  message: string;
}

export interface SnapshotWire {
  version: number;
  events_seen: number;
  computed_at: number;
  kpis: KpisWire;
  progress: ProgressRowWire[];
  kc_summary: { kcs: KcTotalsWire[] };
  histogram: HistogramWire;
  clustering: ClusteringWire;
  alerts: AlertWire[];
  recommendations: RecommendationWire[];
  degraded: boolean;
  error: string | null;
}

export interface SpecWire {
  kcs: Array<{ id: string; name: string }>;
  questions: Array<{ id: string; kc_id: string }>;
  roster: Array<{ id: string; name: string }>;
}
