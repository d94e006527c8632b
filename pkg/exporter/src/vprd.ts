/**
 * VPRD v1 binary matrices, the file contract shared with the engine.
 *
 * Layout (little-endian): "VPRD" magic, u8 version=1, u8 dtype=1 (f32),
 * u8 role (0 descriptors, 1 scores), u32 rows, u32 cols, then
 * rows*cols float32 values in row-major order.
 */

import * as fs from 'fs'

export const ROLE_DESCRIPTORS = 0
export const ROLE_SCORES = 1

const MAGIC = 'VPRD'
const HEADER_SIZE = 15

export interface Matrix {
  rows: number
  cols: number
  /** row-major, length rows*cols */
  data: Float64Array
  role: number
}

export function matrixFromRows(rows: number[][], role: number): Matrix {
  const cols = rows.length > 0 ? rows[0].length : 0
  const data = new Float64Array(rows.length * cols)
  rows.forEach((row, r) => {
    if (row.length !== cols) {
      throw new Error(`row ${r} has ${row.length} values, expected ${cols}`)
    }
    data.set(row, r * cols)
  })
  return { rows: rows.length, cols, data, role }
}

export function rowOf(matrix: Matrix, r: number): Float64Array {
  return matrix.data.subarray(r * matrix.cols, (r + 1) * matrix.cols)
}

export function saveVprd(path: string, matrix: Matrix): void {
  const { rows, cols, data, role } = matrix
  if (role !== ROLE_DESCRIPTORS && role !== ROLE_SCORES) {
    throw new Error(`role must be 0 or 1, got ${role}`)
  }
  if (data.length !== rows * cols) {
    throw new Error(`data length ${data.length} != ${rows}x${cols}`)
  }
  const buf = Buffer.alloc(HEADER_SIZE + rows * cols * 4)
  buf.write(MAGIC, 0, 'ascii')
  buf.writeUInt8(1, 4) // version
  buf.writeUInt8(1, 5) // dtype f32
  buf.writeUInt8(role, 6)
  buf.writeUInt32LE(rows, 7)
  buf.writeUInt32LE(cols, 11)
  for (let i = 0; i < data.length; i++) {
    const v = data[i]
    if (!Number.isFinite(v)) {
      throw new Error(`non-finite value at element ${i}`)
    }
    buf.writeFloatLE(Math.fround(v), HEADER_SIZE + i * 4)
  }
  fs.writeFileSync(path, buf)
}

export function loadVprd(path: string): Matrix {
  const buf = fs.readFileSync(path)
  if (buf.length < HEADER_SIZE) {
    throw new Error(
      `${path}: header needs ${HEADER_SIZE} bytes, file has ${buf.length}`,
    )
  }
  if (buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error(`${path}: bad magic at byte 0`)
  }
  if (buf.readUInt8(4) !== 1) {
    throw new Error(`${path}: unsupported version at byte 4`)
  }
  if (buf.readUInt8(5) !== 1) {
    throw new Error(`${path}: unsupported dtype at byte 5`)
  }
  const role = buf.readUInt8(6)
  if (role !== ROLE_DESCRIPTORS && role !== ROLE_SCORES) {
    throw new Error(`${path}: unknown role at byte 6`)
  }
  const rows = buf.readUInt32LE(7)
  const cols = buf.readUInt32LE(11)
  const expected = HEADER_SIZE + rows * cols * 4
  if (buf.length < expected) {
    throw new Error(
      `${path}: payload ends at byte ${buf.length}, expected ${expected} bytes`,
    )
  }
  const data = new Float64Array(rows * cols)
  for (let i = 0; i < data.length; i++) {
    const v = buf.readFloatLE(HEADER_SIZE + i * 4)
    if (!Number.isFinite(v)) {
      throw new Error(`${path}: non-finite value at byte ${HEADER_SIZE + i * 4}`)
    }
    data[i] = v
  }
  return { rows, cols, data, role }
}
