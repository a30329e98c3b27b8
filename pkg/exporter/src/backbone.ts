/**
 * Embedding backbones.
 *
 * A backbone is any function from a batch of preprocessed images to a
 * batch of fixed-length vectors.  The default is a seeded random
 * projection of the grayscale pixels: not a learned model, but cheap,
 * dependency-free, and fully deterministic, which is what the export
 * contract actually needs.  Swapping in a real encoder later only
 * means providing another object with the same shape.
 */

export interface Backbone {
  /** Identifier recorded in sidecar provenance, e.g. "pixel-projection-64". */
  id: string;
  /** Length of every produced vector. */
  dim: number;
  /** Map a batch of grayscale images (row-major, [0, 1]) to vectors. */
  encode(batch: Float64Array[]): Float64Array[];
}

export const DEFAULT_BACKBONE_ID = "pixel-projection-64";

/** Small deterministic PRNG; integer ops only, so it is platform-stable. */
function mulberry32(seed: number): () => number {
  let state = seed | 0;
  return () => {
    state = (state + 0x6d2b79f5) | 0;
    let t = Math.imul(state ^ (state >>> 15), 1 | state);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Random-projection backbone.  Weights are drawn once per distinct
 * input size from a PRNG seeded by (dim, input size), so the same
 * images always map to the same vectors no matter the call order.
 * A constant bias input keeps all-black frames away from the zero
 * vector, and each output is L2-normalized.
 */
export function projectionBackbone(dim: number): Backbone {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`projection backbone dim must be a positive integer, got ${dim}`);
  }
  const weightCache = new Map<number, Float64Array>();

  const weightsFor = (inputSize: number): Float64Array => {
    const cached = weightCache.get(inputSize);
    if (cached !== undefined) {
      return cached;
    }
    const rand = mulberry32(0x70726f6a ^ (dim * 2654435761) ^ inputSize);
    const scale = 1.0 / Math.sqrt(inputSize + 1);
    const weights = new Float64Array(dim * (inputSize + 1));
    for (let i = 0; i < weights.length; i++) {
      weights[i] = (2.0 * rand() - 1.0) * scale;
    }
    weightCache.set(inputSize, weights);
    return weights;
  };

  return {
    id: `pixel-projection-${dim}`,
    dim,
    encode(batch: Float64Array[]): Float64Array[] {
      return batch.map((pixels) => {
        const weights = weightsFor(pixels.length);
        const stride = pixels.length + 1;
        const vec = new Float64Array(dim);
        for (let row = 0; row < dim; row++) {
          let acc = weights[row * stride + pixels.length];
          for (let col = 0; col < pixels.length; col++) {
            acc += weights[row * stride + col] * pixels[col];
          }
          vec[row] = acc;
        }
        let norm = 0.0;
        for (let row = 0; row < dim; row++) {
          norm += vec[row] * vec[row];
        }
        norm = Math.sqrt(norm);
        if (norm > 0.0) {
          for (let row = 0; row < dim; row++) {
            vec[row] /= norm;
          }
        }
        return vec;
      });
    },
  };
}

/**
 * Resolve a backbone identifier.  Currently the only family is
 * "pixel-projection-<dim>".
 */
export function backboneFromId(id: string): Backbone {
  const match = /^pixel-projection-(\d+)$/.exec(id);
  if (match === null) {
    throw new Error(
      `unknown backbone ${JSON.stringify(id)}; expected pixel-projection-<dim>`
    );
  }
  return projectionBackbone(Number(match[1]));
}
