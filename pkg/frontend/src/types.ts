/** Wire types for the sculpting service (mirrors the layout/session JSON). */

export type Axis = "horizontal" | "vertical";

/** Per-axis (attribute, category) pairs, outermost nesting level first. */
export interface FacetKeyDoc {
  h: [string, string][];
  v: [string, string][];
}

export interface CellDoc {
  key: FacetKeyDoc;
  hIndex: number;
  vIndex: number;
  x: number;
  y: number;
  count: number;
  colorValue: number;
  peekFractions: number[] | null;
}

export interface LabelSpanDoc {
  label: string;
  start: number;
  end: number;
}

export interface LabelLevelDoc {
  attribute: string;
  showName: boolean;
  spans: LabelSpanDoc[];
}

export interface LinkDoc {
  id: string;
  source: FacetKeyDoc;
  target: FacetKeyDoc;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  thickness: number;
  weight: number;
  edgeCount: number;
}

export interface StyleDoc {
  colorRamp: string[];
  palette: string[];
  linkColor: string;
  linkOpacity: number;
  originLinkColor: string;
  incomingLinkColor: string;
}

export interface LayoutDoc {
  substrateId: number;
  substrateName: string;
  canvasWidth: number;
  canvasHeight: number;
  surfaceWidth: number;
  surfaceHeight: number;
  nX: number;
  nY: number;
  cellSize: number;
  nodeRadius: number;
  showCountLabels: boolean;
  showArrows: boolean;
  peekAttribute: string | null;
  peekCategories: string[];
  maxCount: number;
  cells: CellDoc[];
  hLabels: LabelLevelDoc[];
  vLabels: LabelLevelDoc[];
  links: LinkDoc[];
  style: StyleDoc;
}

export interface ColumnInfo {
  name: string;
  kind: "nominal" | "quantitative";
}

export interface DatasetInfo {
  rowCount: number;
  columns: ColumnInfo[];
  hasEdges: boolean;
}

export interface PileDoc {
  attribute: string;
  members: string[];
  name: string;
}

export interface SubstrateSummary {
  id: number;
  name: string;
  liveCount: number;
  prunedCount: number;
  hAxis: string[];
  vAxis: string[];
  piles: PileDoc[];
  peek: string | null;
  showLinks: boolean;
  showArrows: boolean;
}

export interface OpDoc {
  kind: string;
  params: Record<string, unknown>;
  timestamp?: number;
}

export interface LogInfo {
  cursor: number;
  length: number;
  entries: OpDoc[];
}

export interface SessionInfo {
  sessionId: string;
  createdAt: number;
  dataset: DatasetInfo;
  substrates: SubstrateSummary[];
  log: LogInfo;
}

/** Response of POST ops/undo/redo. */
export interface MutationResponse {
  substrates: SubstrateSummary[];
  log: LogInfo;
}

export interface HistogramBin {
  category: string;
  count: number;
}

export interface HistogramDoc {
  attribute: string;
  bins: HistogramBin[];
}

export type SelectionMode = "nodes" | "row-facet" | "column-facet";

export interface SelectionDoc {
  substrateId: number;
  mode: SelectionMode;
  keys: unknown[];
}
