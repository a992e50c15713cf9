/**
 * Parser for .ctcm matrix files: a magic line "ctcm 1", a metadata line
 * "T=<frames> C=<chars> kind=prob|logit", then T rows of C+1 floats
 * separated by single spaces.  The last column is the CTC blank.
 */

export type MatrixKind = "prob" | "logit";

export interface CtcMatrix {
  frames: number[][];
  kind: MatrixKind;
}

export class CtcmParseError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CtcmParseError";
  }
}

// repr() output of the writing side; Number() covers everything else.
const SPECIAL_FLOATS: Record<string, number> = {
  inf: Infinity,
  "-inf": -Infinity,
  nan: NaN,
};

function parseFloatToken(token: string, where: string): number {
  if (token in SPECIAL_FLOATS) return SPECIAL_FLOATS[token];
  if (token === "" || /\s/.test(token)) {
    throw new CtcmParseError(`${where}: bad float ${JSON.stringify(token)}`);
  }
  const value = Number(token);
  if (Number.isNaN(value)) {
    throw new CtcmParseError(`${where}: bad float ${JSON.stringify(token)}`);
  }
  return value;
}

export function parseCtcm(text: string): CtcMatrix {
  const lines = text.split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();

  if (lines[0] !== "ctcm 1") {
    throw new CtcmParseError("line 1: expected magic 'ctcm 1'");
  }
  const meta = /^T=(\d+) C=(\d+) kind=(prob|logit)$/.exec(lines[1] ?? "");
  if (!meta) {
    throw new CtcmParseError("line 2: expected 'T=<frames> C=<chars> kind=prob|logit'");
  }
  const t = Number(meta[1]);
  const c = Number(meta[2]);
  const kind = meta[3] as MatrixKind;

  const rowLines = lines.slice(2);
  if (rowLines.length !== t) {
    throw new CtcmParseError(`expected ${t} rows, file has ${rowLines.length}`);
  }
  const frames: number[][] = [];
  for (let i = 0; i < t; i++) {
    const where = `line ${i + 3}`;
    const tokens = rowLines[i].split(" ");
    if (tokens.length !== c + 1) {
      throw new CtcmParseError(
        `${where}: expected ${c + 1} values, found ${tokens.length}`
      );
    }
    frames.push(tokens.map((token) => parseFloatToken(token, where)));
  }
  return { frames, kind };
}
