/**
 * Minimal image ingestion: binary PGM (P5) and PPM (P6), the formats
 * fixture pipelines produce without any codec dependency. Color input
 * is converted to grayscale here so the engine side never has to.
 */

import * as fs from 'fs'

export interface GrayImage {
  width: number
  height: number
  /** row-major pixels in [0, 255] */
  pixels: Float64Array
}

/** Header tokens of a netpbm file, skipping whitespace and # comments. */
function readTokens(buf: Buffer, count: number): { tokens: string[]; end: number } {
  const tokens: string[] = []
  let i = 0
  while (tokens.length < count) {
    if (i >= buf.length) throw new Error('incomplete netpbm header')
    const ch = buf[i]
    if (ch === 0x23) { // '#'
      while (i < buf.length && buf[i] !== 0x0a) i++
      continue
    }
    if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
      i++
      continue
    }
    let j = i
    while (j < buf.length && !isSpace(buf[j]) && buf[j] !== 0x23) j++
    tokens.push(buf.toString('ascii', i, j))
    i = j
  }
  return { tokens, end: i }
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d
}

export function loadImage(path: string): GrayImage {
  const buf = fs.readFileSync(path)
  const magic = buf.toString('ascii', 0, 2)
  if (magic !== 'P5' && magic !== 'P6') {
    throw new Error(`${path}: expected P5 or P6 magic, got '${magic}'`)
  }
  const { tokens, end } = readTokens(buf.subarray(2), 3)
  const [width, height, maxval] = tokens.map(Number)
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error(`${path}: malformed dimensions ${tokens.join(' ')}`)
  }
  if (maxval <= 0 || maxval > 255) {
    throw new Error(`${path}: only 8-bit images supported, maxval=${maxval}`)
  }
  const channels = magic === 'P5' ? 1 : 3
  const start = 2 + end + 1 // single whitespace byte after maxval
  const needed = width * height * channels
  if (buf.length < start + needed) {
    throw new Error(`${path}: pixel data ends at byte ${buf.length}, expected ${start + needed}`)
  }
  const pixels = new Float64Array(width * height)
  if (channels === 1) {
    for (let i = 0; i < pixels.length; i++) pixels[i] = buf[start + i]
  } else {
    for (let i = 0; i < pixels.length; i++) {
      const o = start + i * 3
      // ITU-R BT.601 luma
      pixels[i] = 0.299 * buf[o] + 0.587 * buf[o + 1] + 0.114 * buf[o + 2]
    }
  }
  return { width, height, pixels }
}

export function savePgm(path: string, image: GrayImage): void {
  const header = `P5\n${image.width} ${image.height}\n255\n`
  const buf = Buffer.alloc(header.length + image.pixels.length)
  buf.write(header, 0, 'ascii')
  for (let i = 0; i < image.pixels.length; i++) {
    buf[header.length + i] = Math.max(0, Math.min(255, Math.round(image.pixels[i])))
  }
  fs.writeFileSync(path, buf)
}

/** Bilinear resample using the pixel-center convention. */
export function resize(image: GrayImage, width: number, height: number): GrayImage {
  const out = new Float64Array(width * height)
  const { width: sw, height: sh, pixels } = image
  for (let y = 0; y < height; y++) {
    let sy = (y + 0.5) * (sh / height) - 0.5
    sy = Math.min(Math.max(sy, 0), sh - 1)
    const y0 = Math.floor(sy)
    const y1 = Math.min(y0 + 1, sh - 1)
    const wy = sy - y0
    for (let x = 0; x < width; x++) {
      let sx = (x + 0.5) * (sw / width) - 0.5
      sx = Math.min(Math.max(sx, 0), sw - 1)
      const x0 = Math.floor(sx)
      const x1 = Math.min(x0 + 1, sw - 1)
      const wx = sx - x0
      const top = pixels[y0 * sw + x0] * (1 - wx) + pixels[y0 * sw + x1] * wx
      const bot = pixels[y1 * sw + x0] * (1 - wx) + pixels[y1 * sw + x1] * wx
      out[y * width + x] = top * (1 - wy) + bot * wy
    }
  }
  return { width, height, pixels: out }
}
