/**
 * Batch export jobs: image folders to descriptor matrices, descriptor
 * pairs to cosine score matrices. Row order is always lexicographic
 * filename order, the contract the sequential engine relies on, and a
 * sidecar JSON records exactly how each file was produced.
 */

import * as fs from 'fs'
import * as path from 'path'

import { loadImage } from './images'
import { DescriptorModel } from './models'
import {
  Matrix,
  ROLE_DESCRIPTORS,
  ROLE_SCORES,
  loadVprd,
  matrixFromRows,
  rowOf,
  saveVprd,
} from './vprd'

const IMAGE_EXTENSIONS = new Set(['.pgm', '.ppm'])

export interface ExportJob {
  model: DescriptorModel
  imageDir: string
  outPath: string
}

export function listImages(dir: string): string[] {
  if (!fs.existsSync(dir)) throw new Error(`image folder not found: ${dir}`)
  const names = fs
    .readdirSync(dir)
    .filter((n) => IMAGE_EXTENSIONS.has(path.extname(n).toLowerCase()))
    .sort() // lexicographic: the cross-component frame order
  if (names.length === 0) {
    throw new Error(`no .pgm/.ppm images under ${dir}`)
  }
  return names
}

export async function exportDescriptors(job: ExportJob): Promise<Matrix> {
  const names = listImages(job.imageDir)
  const rows: number[][] = []
  for (const name of names) {
    const imagePath = path.join(job.imageDir, name)
    let image
    try {
      image = loadImage(imagePath)
    } catch (err) {
      throw new Error(`unreadable image ${name}: ${(err as Error).message}`)
    }
    rows.push(Array.from(await job.model.describe(image)))
  }
  const matrix = matrixFromRows(rows, ROLE_DESCRIPTORS)
  saveVprd(job.outPath, matrix)
  writeSidecar(job.outPath, {
    model: job.model.name,
    preprocessing: job.model.meta(),
    rows: matrix.rows,
    dims: matrix.cols,
    images: names,
  })
  return matrix
}

export function exportScoreMatrix(
  refPath: string,
  queryPath: string,
  outPath: string,
): Matrix {
  const refs = loadVprd(refPath)
  const queries = loadVprd(queryPath)
  if (refs.cols !== queries.cols) {
    throw new Error(
      `descriptor dims differ: refs ${refs.cols} vs queries ${queries.cols}`,
    )
  }
  const rows: number[][] = []
  for (let q = 0; q < queries.rows; q++) {
    const qd = rowOf(queries, q)
    const row = new Array<number>(refs.rows)
    for (let r = 0; r < refs.rows; r++) {
      row[r] = cosine(qd, rowOf(refs, r))
    }
    rows.push(row)
  }
  const matrix = matrixFromRows(rows, ROLE_SCORES)
  saveVprd(outPath, matrix)
  writeSidecar(outPath, {
    references: path.basename(refPath),
    queries: path.basename(queryPath),
    measure: 'cosine',
    rows: matrix.rows,
    cols: matrix.cols,
  })
  return matrix
}

export function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0
  let na = 0
  let nb = 0
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i]
    na += a[i] * a[i]
    nb += b[i] * b[i]
  }
  if (na === 0 || nb === 0) {
    throw new Error('cosine undefined for a zero-norm descriptor')
  }
  return dot / Math.sqrt(na * nb)
}

function writeSidecar(outPath: string, doc: Record<string, unknown>): void {
  fs.writeFileSync(`${outPath}.meta.json`, JSON.stringify(doc, null, 2) + '\n')
}
