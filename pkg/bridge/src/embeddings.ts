/** Writers/readers for the toolkit embedding file format:
 *
 *     dim=<d> extractor=<tag>
 *     <image id> <d space-separated decimal floats>
 *
 * Floats carry 17 significant digits, which round-trips IEEE doubles, so
 * files are bit-compatible with the Python loader.
 */

export function formatFloat(v: number): string {
  if (Number.isInteger(v) && Math.abs(v) < 1e15) return v.toString();
  return v.toPrecision(17);
}

export function formatEmbeddings(
  dim: number,
  extractor: string,
  entries: Map<string, Float64Array>,
): string {
  const lines = [`dim=${dim} extractor=${extractor}`];
  for (const id of [...entries.keys()].sort()) {
    const vec = entries.get(id)!;
    lines.push(`${id} ${Array.from(vec, formatFloat).join(' ')}`);
  }
  return lines.join('\n') + '\n';
}

export interface ParsedEmbeddings {
  dim: number;
  extractor: string;
  vectors: Map<string, Float64Array>;
}

export function parseEmbeddings(text: string): ParsedEmbeddings {
  const lines = text.split(/\r?\n/).filter((l) => l.length && !l.startsWith('#'));
  if (!lines.length) throw new Error('empty embedding file');
  const header = new Map(
    lines[0]
      .split(/\s+/)
      .filter((p) => p.includes('='))
      .map((p) => p.split('=', 2) as [string, string]),
  );
  const dim = Number(header.get('dim'));
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error('header must declare a positive integer dim');
  }
  const vectors = new Map<string, Float64Array>();
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].trim().split(/\s+/);
    if (parts.length !== dim + 1) {
      throw new Error(`line ${i + 1}: expected id plus ${dim} values`);
    }
    const id = parts[0];
    if (vectors.has(id)) throw new Error(`duplicate id '${id}'`);
    const vec = Float64Array.from(parts.slice(1), Number);
    if (vec.some((v) => !Number.isFinite(v))) {
      throw new Error(`line ${i + 1}: non-finite value`);
    }
    vectors.set(id, vec);
  }
  return { dim, extractor: header.get('extractor') ?? 'unknown', vectors };
}
