export {
  BoundDecoder,
  LexidecodeClient,
  ServiceError,
} from "./client.js";
export type {
  DecodeResult,
  DecoderInfo,
  DecoderName,
  DecoderSpec,
  Health,
  ImprovementReport,
  MetricReport,
  Pair,
} from "./client.js";
export { CtcmParseError, parseCtcm } from "./ctcm.js";
export type { CtcMatrix, MatrixKind } from "./ctcm.js";
