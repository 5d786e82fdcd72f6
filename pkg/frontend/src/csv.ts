import fs from 'fs'
import path from 'path'
import Papa from 'papaparse'

export interface MetricsTable {
  path: string
  columns: string[]
  rows: Record<string, number | string>[]
}

export interface AggregateRow {
  cell: string
  median: number
  min: number
  max: number
  diverged: number
  n: number
}

export function toNum(v: unknown): number {
  if (typeof v === 'number') return v
  if (v === undefined || v === null || v === '') return NaN
  return Number(v)
}

function parseCsv(text: string, file: string) {
  const res = Papa.parse<Record<string, number | string>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
    comments: '#',
  })
  if (res.errors.length > 0) {
    const e = res.errors[0]
    throw new Error(`${file}: CSV parse error at row ${e.row}: ${e.message}`)
  }
  return res
}

export function readMetrics(file: string): MetricsTable {
  const text = fs.readFileSync(file, 'utf8')
  const res = parseCsv(text, file)
  const columns = res.meta.fields ?? []
  for (const col of ['step', 'phase', 'loss']) {
    if (!columns.includes(col)) {
      throw new Error(`${file}: missing required column '${col}'`)
    }
  }
  return { path: file, columns, rows: res.data }
}

export function readAggregate(file: string): AggregateRow[] {
  const text = fs.readFileSync(file, 'utf8')
  const res = parseCsv(text, file)
  const columns = res.meta.fields ?? []
  for (const col of ['cell', 'median', 'min', 'max']) {
    if (!columns.includes(col)) {
      throw new Error(`${file}: missing required column '${col}'`)
    }
  }
  return res.data.map((r) => ({
    cell: String(r.cell),
    median: toNum(r.median),
    min: toNum(r.min),
    max: toNum(r.max),
    diverged: toNum(r.diverged ?? 0),
    n: toNum(r.n ?? 0),
  }))
}

/** pred_0..pred_k column names in index order, empty if none. */
export function predColumns(columns: string[]): string[] {
  return columns
    .filter((c) => /^pred_\d+$/.test(c))
    .sort((a, b) => Number(a.slice(5)) - Number(b.slice(5)))
}

export function targetColumns(columns: string[]): string[] {
  return columns
    .filter((c) => /^target_\d+$/.test(c))
    .sort((a, b) => Number(a.slice(7)) - Number(b.slice(7)))
}

/** Label for a run, from its directory name (metrics files are all named metrics.csv). */
export function runLabel(file: string): string {
  const dir = path.dirname(path.resolve(file))
  const base = path.basename(file, '.csv')
  return base === 'metrics' ? path.basename(dir) : base
}

/** Reads test_loss out of a run's summary.json, for baseline lines. */
export function readSummaryTestLoss(file: string): number {
  const obj = JSON.parse(fs.readFileSync(file, 'utf8'))
  const v = toNum(obj.test_loss)
  if (!Number.isFinite(v)) {
    throw new Error(`${file}: summary has no finite test_loss`)
  }
  return v
}
