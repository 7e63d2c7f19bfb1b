#!/usr/bin/env node
import { parseArgs } from 'util';

import { extract } from './extract.js';
import { MODEL_ALLOWLIST } from './models.js';

const HELP = `face-embed-bridge: batch face embeddings in the madkit file format

usage: face-embed-bridge --images DIR --out FILE [options]

options:
  --images DIR            directory of <image id>.png files (required)
  --out FILE              output embedding file (required)
  --model TAG             ${MODEL_ALLOWLIST.join(' | ')} (default grid-dct-v1)
  --landmarks DIR         directory of <image id>.lm files for eye alignment
  --require-landmarks     skip images without landmarks instead of using the prior
  --inter-eye PX          target inter-eye distance in the crop (default 180)
  --crop PX               aligned crop size (default 448)
  --model-dir DIR         tfjs-graph: directory containing model.json
  --export-landmarks DIR  write the aligned landmarks next to the embeddings
  --help
`;

export async function main(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      images: { type: 'string' },
      out: { type: 'string' },
      model: { type: 'string', default: 'grid-dct-v1' },
      landmarks: { type: 'string' },
      'require-landmarks': { type: 'boolean', default: false },
      'inter-eye': { type: 'string', default: '180' },
      crop: { type: 'string', default: '448' },
      'model-dir': { type: 'string' },
      'export-landmarks': { type: 'string' },
      help: { type: 'boolean', default: false },
    },
  });
  if (values.help) {
    process.stdout.write(HELP);
    return 0;
  }
  if (!values.images || !values.out) {
    process.stderr.write(HELP);
    return 2;
  }
  try {
    const result = await extract({
      modelTag: values.model!,
      imagesDir: values.images,
      outPath: values.out,
      landmarksDir: values.landmarks,
      requireLandmarks: values['require-landmarks'],
      interEyeDistance: Number(values['inter-eye']),
      cropSize: Number(values.crop),
      modelDir: values['model-dir'],
      exportLandmarksDir: values['export-landmarks'],
    });
    console.log(
      `wrote ${result.count} embeddings (dim ${result.dim}, ${result.extractor}) ` +
        `to ${values.out}; skipped ${result.skipped.length}`,
    );
    for (const s of result.skipped) {
      console.warn(`  skipped ${s.id}: ${s.reason}`);
    }
    return 0;
  } catch (err) {
    console.error(`face-embed-bridge: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] && import.meta.url.endsWith(process.argv[1].split('/').pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
