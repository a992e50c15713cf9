/**
 * HTTP client for the lexidecode service.  Field names match the wire
 * format one to one, so responses arrive untranslated and numbers keep
 * full precision.  Needs a global fetch (Node 18+ or any browser).
 */

import type { MatrixKind } from "./ctcm.js";

export type DecoderName = "wbs" | "greedy";

export interface DecoderSpec {
  alphabet: string;
  word_chars: string;
  corpus_words: string[];
  beam_width?: number;
  require_complete_words?: boolean;
  log_space?: boolean;
}

export interface DecoderInfo {
  decoder_id: string;
  alphabet: string;
  word_chars: string;
  word_count: number;
  node_count: number;
  beam_width: number;
  require_complete_words: boolean;
  log_space: boolean;
}

export interface DecodeResult {
  text: string;
  score: number;
}

/** (ground truth, prediction) */
export type Pair = [string, string];

export interface MetricReport {
  pair_count: number;
  cer_percent: number | null;
  char_edits: number | null;
  char_total: number | null;
  wer_percent: number | null;
  word_edits: number | null;
  word_total: number | null;
}

export interface ImprovementReport {
  baseline: number;
  improved: number;
  improvement_percent: number | null;
}

export interface Health {
  status: string;
  version: string;
}

/** Error reported by the service, carrying its kind and HTTP status. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

function toServiceError(status: number, payload: unknown): ServiceError {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (detail && typeof detail === "object" && !Array.isArray(detail)) {
      const d = detail as { kind?: string; message?: string };
      return new ServiceError(
        status,
        d.kind ?? "invalid_input",
        d.message ?? `HTTP ${status}`
      );
    }
    // Validation errors and plain-string details.
    return new ServiceError(status, "invalid_input", JSON.stringify(detail));
  }
  return new ServiceError(status, "invalid_input", `HTTP ${status}`);
}

export class LexidecodeClient {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  health(): Promise<Health> {
    return this.request<Health>("GET", "/health");
  }

  /** Bind alphabet, corpus, and options on the service; the returned
   * handle stays valid until disposed. */
  async buildDecoder(spec: DecoderSpec): Promise<BoundDecoder> {
    const info = await this.request<DecoderInfo>("POST", "/decoders", spec);
    return new BoundDecoder(this, info);
  }

  cer(pairs: Pair[]): Promise<MetricReport> {
    return this.request<MetricReport>("POST", "/metrics/cer", { pairs });
  }

  wer(pairs: Pair[], word_chars: string): Promise<MetricReport> {
    return this.request<MetricReport>("POST", "/metrics/wer", { pairs, word_chars });
  }

  improvement(baseline: number, improved: number): Promise<ImprovementReport> {
    return this.request<ImprovementReport>("POST", "/metrics/improvement", {
      baseline,
      improved,
    });
  }

  async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const payload: unknown = await response.json().catch(() => undefined);
    if (!response.ok) {
      throw toServiceError(response.status, payload);
    }
    return payload as T;
  }
}

export class BoundDecoder {
  constructor(
    private readonly client: LexidecodeClient,
    readonly info: DecoderInfo
  ) {}

  get id(): string {
    return this.info.decoder_id;
  }

  /** Decode one T x (C+1) matrix; the last column is the blank. */
  decode(
    matrix: number[][],
    options?: { kind?: MatrixKind; decoder?: DecoderName }
  ): Promise<DecodeResult> {
    return this.client.request<DecodeResult>(
      "POST",
      `/decoders/${this.id}/decode`,
      {
        matrix,
        kind: options?.kind ?? "prob",
        decoder: options?.decoder ?? "wbs",
      }
    );
  }

  refresh(): Promise<DecoderInfo> {
    return this.client.request<DecoderInfo>("GET", `/decoders/${this.id}`);
  }

  dispose(): Promise<void> {
    return this.client.request<void>("DELETE", `/decoders/${this.id}`);
  }
}
