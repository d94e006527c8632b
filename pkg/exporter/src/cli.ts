#!/usr/bin/env node
/**
 * Command-line entry points:
 *
 *   vprd-exporter export-descriptors --model tiny-image --images DIR --out FILE
 *   vprd-exporter export-scores --refs FILE --queries FILE --out FILE
 *
 * Exit codes: 0 success, 2 usage error, 1 processing error.
 */

import { exportDescriptors, exportScoreMatrix } from './export'
import { buildModel } from './models'

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i]
    const value = argv[i + 1]
    if (!key.startsWith('--') || value === undefined) {
      throw new UsageError(`expected "--flag value" pairs, got '${key}'`)
    }
    flags.set(key.slice(2), value)
  }
  return flags
}

class UsageError extends Error {}

function need(flags: Map<string, string>, name: string): string {
  const value = flags.get(name)
  if (value === undefined) throw new UsageError(`missing --${name}`)
  return value
}

async function run(argv: string[]): Promise<number> {
  const [command, ...rest] = argv
  if (command === 'export-descriptors') {
    const flags = parseFlags(rest)
    const model = buildModel(flags.get('model') ?? 'tiny-image')
    const matrix = await exportDescriptors({
      model,
      imageDir: need(flags, 'images'),
      outPath: need(flags, 'out'),
    })
    console.log(
      `wrote ${matrix.rows}x${matrix.cols} descriptors to ${flags.get('out')}`,
    )
    return 0
  }
  if (command === 'export-scores') {
    const flags = parseFlags(rest)
    const matrix = exportScoreMatrix(
      need(flags, 'refs'),
      need(flags, 'queries'),
      need(flags, 'out'),
    )
    console.log(
      `wrote ${matrix.rows}x${matrix.cols} score matrix to ${flags.get('out')}`,
    )
    return 0
  }
  throw new UsageError(
    `unknown command '${command ?? ''}' ` +
      '(expected export-descriptors or export-scores)',
  )
}

run(process.argv.slice(2))
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(err instanceof Error ? err.message : String(err))
    process.exit(err instanceof UsageError ? 2 : 1)
  })
