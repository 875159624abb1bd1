export { parseCsv, expectHeader, column, SchemaError } from "./csv.js";
export type { Table } from "./csv.js";
export {
  renderBars,
  renderField2d,
  renderFieldFamily,
  renderSurface,
  renderTrace,
} from "./figures.js";
export { planFigures, readReport, render } from "./report.js";
export type { FigureKind, FigureSpec, ReportInfo } from "./report.js";
