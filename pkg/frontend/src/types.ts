// TypeScript mirrors of the service's JSON documents. Field names follow the
// wire format exactly; keep in sync with the HTTP API, not the Python code.

export type Mark = 'bar' | 'point' | 'tick' | 'histogram';

export type Role = 'categorical' | 'quantitative' | 'identifier';

export interface Encoding {
  field: string;
  role: Role;
  aggregate: string | null;
  binStep: number | null;
}

export type HighlightOp = 'eq' | 'outside-range' | 'inside-range';

export interface Highlight {
  field: string;
  op: HighlightOp;
  // 'eq' carries a scalar, the range ops carry [lo, hi]
  value: string | number | [number, number];
}

export interface FilterClause {
  column: string;
  value: string;
}

export interface ChartSpec {
  mark: Mark;
  x: Encoding;
  y: Encoding | null;
  filter: FilterClause | null;
  highlight: Highlight | null;
  title: string;
  limit: number | null;
  sort: 'ascending' | 'descending' | null;
}

// Plot-ready rows as produced by the service: bar/point rows are {x, y},
// tick rows are {x}, histogram rows are {x0, x1, y}.
export interface DataRow {
  x?: string | number;
  y?: number;
  x0?: number;
  x1?: number;
}

export interface AnswerDoc {
  insightIds: string[];
  actionText: string;
}

export type QuestionKind = 'LogicallyRelated' | 'AttributeRelated';

export interface QuestionDoc {
  id: string;
  kind: QuestionKind;
  text: string;
  sourceInsightId: string;
  rankTier: number;
  rankStrength: number;
  answers: AnswerDoc[];
}

export interface InsightEntryDoc {
  insightId: string;
  text: string;
  chart: ChartSpec;
  data: DataRow[];
}

export type CellKind = 'Visualization' | 'ActionList';

export interface CellDoc {
  id: number;
  kind: CellKind;
  parentId: number | null;
  spawnedByQuestionId: string | null;
  createdAtEvent: number;
  archived: boolean;
  content: {
    insights?: InsightEntryDoc[];
    questionId?: string;
    questionText?: string;
    actions?: AnswerDoc[];
  };
  panel?: QuestionDoc[];
}

export interface TreeNodeDoc {
  id: number;
  parentId: number | null;
  archived: boolean;
  kind: CellKind;
  summary: string;
  chart: ChartSpec | null;
  data?: DataRow[];
}

export interface TreeDoc {
  nodes: TreeNodeDoc[];
}

export interface SessionDoc {
  sessionId: string;
  datasetId: string;
  dataset: string;
  cells: CellDoc[];
  tree: TreeDoc;
}

export interface ColumnDoc {
  name: string;
  role: Role;
  distinct: number;
  missing: number;
}

export interface DatasetDoc {
  datasetId: string;
  name: string;
  rowCount: number;
  schema: { name: string; rowCount: number; columns: ColumnDoc[] };
  insightCount: number;
}

export interface RecommendationsDoc {
  cellId: number;
  questions: QuestionDoc[];
}

export interface SelectResponse {
  cell: CellDoc;
  tree: TreeDoc;
}

export interface TreeResponse {
  tree: TreeDoc;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}
