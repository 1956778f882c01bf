export {
  AGGREGATE_COLUMNS,
  AggregateRow,
  AggregateTable,
  CsvSchemaError,
  parseAggregateCsv,
  readAggregateCsv,
  seriesFor,
} from "./csv";
export { PlotDataError, RenderOptions, renderRegretPlot } from "./svg";
export { main, parseArgs } from "./cli";
