/**
 * Descriptor models. The patch-based ones are self-contained and fully
 * deterministic; CNN-class models are loaded from a local TensorFlow.js
 * graph-model directory and fail with a clear "missing weights" error
 * when the directory is absent, so batch jobs never half-run.
 */

import * as fs from 'fs'
import * as path from 'path'

import { GrayImage, resize } from './images'

export interface DescriptorModel {
  name: string
  length: number
  describe(image: GrayImage): Promise<Float64Array> | Float64Array
  /** preprocessing details recorded in the sidecar */
  meta(): Record<string, unknown>
}

/** Downsampled raw intensities, a lightweight whole-image signature. */
export function tinyImageModel(size = 8): DescriptorModel {
  return {
    name: 'tiny-image',
    length: size * size,
    describe(image) {
      return resize(image, size, size).pixels
    },
    meta() {
      return { resize: [size, size], interpolation: 'bilinear' }
    },
  }
}

/** Mean intensity per grid cell; even cheaper, very viewpoint-tolerant. */
export function gridMeanModel(grid = 4): DescriptorModel {
  return {
    name: 'grid-mean',
    length: grid * grid,
    describe(image) {
      const out = new Float64Array(grid * grid)
      const counts = new Float64Array(grid * grid)
      for (let y = 0; y < image.height; y++) {
        const gy = Math.min(grid - 1, Math.floor((y * grid) / image.height))
        for (let x = 0; x < image.width; x++) {
          const gx = Math.min(grid - 1, Math.floor((x * grid) / image.width))
          out[gy * grid + gx] += image.pixels[y * image.width + x]
          counts[gy * grid + gx] += 1
        }
      }
      for (let i = 0; i < out.length; i++) out[i] /= counts[i] || 1
      return out
    },
    meta() {
      return { grid: [grid, grid] }
    },
  }
}

/**
 * CNN-class model backed by a local TensorFlow.js graph model
 * (model.json plus weight shards). Runs on the CPU backend; the
 * descriptor is the flattened output tensor.
 */
export function cnnModel(modelDir: string, inputSize = 224): DescriptorModel {
  const modelJson = path.join(modelDir, 'model.json')
  if (!fs.existsSync(modelJson)) {
    throw new Error(`missing weights: no model.json under ${modelDir}`)
  }
  let loaded: Promise<any> | null = null
  let outputLength = -1

  async function load() {
    // Resolved lazily so patch-based exports never need the dependency.
    let tf: any
    try {
      // eslint-disable-next-line @typescript-eslint/no-var-requires
      tf = require('@tensorflow/tfjs')
    } catch {
      throw new Error(
        'CNN export needs the @tensorflow/tfjs package to be installed',
      )
    }
    const artifacts = readGraphModelArtifacts(modelDir)
    const model = await tf.loadGraphModel({ load: async () => artifacts })
    return { tf, model }
  }

  return {
    name: `cnn:${path.basename(modelDir)}`,
    get length() {
      return outputLength
    },
    async describe(image) {
      if (!loaded) loaded = load()
      const { tf, model } = await loaded
      const square = resize(image, inputSize, inputSize)
      const input = tf.tensor4d(
        Array.from(square.pixels, (v: number) => v / 255),
        [1, inputSize, inputSize, 1],
      )
      const rgb = tf.concat([input, input, input], 3)
      const out = model.predict(rgb)
      const data = await out.data()
      input.dispose()
      rgb.dispose()
      out.dispose()
      outputLength = data.length
      return Float64Array.from(data)
    },
    meta() {
      return { modelDir, inputSize, scale: '1/255', channels: 'replicated-gray' }
    },
  }
}

/** Assemble TF.js ModelArtifacts from a local graph-model directory. */
function readGraphModelArtifacts(modelDir: string): Record<string, unknown> {
  const spec = JSON.parse(
    fs.readFileSync(path.join(modelDir, 'model.json'), 'utf-8'),
  )
  const manifest = spec.weightsManifest ?? []
  const specs: unknown[] = []
  const buffers: Buffer[] = []
  for (const group of manifest) {
    specs.push(...(group.weights ?? []))
    for (const shard of group.paths ?? []) {
      const shardPath = path.join(modelDir, shard)
      if (!fs.existsSync(shardPath)) {
        throw new Error(`missing weights: shard ${shard} under ${modelDir}`)
      }
      buffers.push(fs.readFileSync(shardPath))
    }
  }
  const blob = Buffer.concat(buffers)
  return {
    modelTopology: spec.modelTopology,
    format: spec.format,
    generatedBy: spec.generatedBy,
    convertedBy: spec.convertedBy,
    weightSpecs: specs,
    weightData: blob.buffer.slice(
      blob.byteOffset,
      blob.byteOffset + blob.byteLength,
    ),
  }
}

export function buildModel(spec: string): DescriptorModel {
  if (spec === 'tiny-image') return tinyImageModel()
  if (spec.startsWith('tiny-image:')) {
    return tinyImageModel(parseInt(spec.split(':')[1], 10))
  }
  if (spec === 'grid-mean') return gridMeanModel()
  if (spec.startsWith('grid-mean:')) {
    return gridMeanModel(parseInt(spec.split(':')[1], 10))
  }
  if (spec.startsWith('cnn:')) return cnnModel(spec.slice(4))
  throw new Error(
    `unknown model '${spec}' (expected tiny-image[:N], grid-mean[:N] or cnn:<dir>)`,
  )
}
