import { MetricsTable, predColumns, targetColumns, toNum, runLabel } from './csv.js'
import { Svg, chartFrame, drawLegend, PALETTE, LegendEntry } from './svg.js'

export interface PredictionsOpts {
  /** How many trailing test-phase steps to show. */
  window: number
  /** Output channel to plot when there are several. */
  channel: number
  labels?: string[]
}

interface Series {
  label: string
  steps: number[]
  values: number[]
}

function testRows(table: MetricsTable) {
  return table.rows.filter((r) => r.phase === 'test')
}

/**
 * Overlay of the target stream and each run's prediction over the final
 * `window` test steps. The target is taken from the first table; runs are
 * expected to share task and schedule.
 */
export function renderPredictions(tables: MetricsTable[], opts: PredictionsOpts): string {
  if (tables.length === 0) throw new Error('no input tables')
  if (opts.window <= 0) throw new Error(`window must be positive, got ${opts.window}`)

  const ch = opts.channel
  const series: Series[] = []
  let target: Series | null = null

  tables.forEach((table, i) => {
    const preds = predColumns(table.columns)
    if (preds.length === 0) {
      throw new Error(`${table.path}: no pred_* columns; rerun with metrics.predictions enabled`)
    }
    if (ch >= preds.length) {
      throw new Error(`${table.path}: channel ${ch} out of range (${preds.length} channels)`)
    }
    const rows = testRows(table).slice(-opts.window)
    if (rows.length === 0) throw new Error(`${table.path}: no test-phase rows`)
    const label = opts.labels?.[i] ?? runLabel(table.path)
    series.push({
      label,
      steps: rows.map((r) => toNum(r.step)),
      values: rows.map((r) => toNum(r[`pred_${ch}`])),
    })
    if (target === null) {
      const tcols = targetColumns(table.columns)
      if (tcols.length > ch) {
        target = {
          label: 'target',
          steps: rows.map((r) => toNum(r.step)),
          values: rows.map((r) => toNum(r[`target_${ch}`])),
        }
      }
    }
  })

  const all = target ? [target, ...series] : series
  const xs = all.flatMap((s) => s.steps)
  const ys = all.flatMap((s) => s.values).filter(Number.isFinite)
  if (ys.length === 0) throw new Error('no finite values in the chosen window')
  const pad = (Math.max(...ys) - Math.min(...ys) || 1) * 0.08

  const svg = new Svg()
  const frame = chartFrame(svg, {
    xDomain: [Math.min(...xs), Math.max(...xs)],
    yDomain: [Math.min(...ys) - pad, Math.max(...ys) + pad],
    xLabel: 'step',
    yLabel: `output ${ch}`,
    title: `test predictions, final ${opts.window} steps`,
  })

  const legend: LegendEntry[] = []
  if (target !== null) {
    const t = target as Series
    svg.polyline(
      t.steps.map((s, i) => [frame.x(s), frame.y(t.values[i])]),
      { stroke: '#111111', 'stroke-width': 2, 'stroke-dasharray': '5 4' },
    )
    legend.push({ label: 'target', color: '#111111', dashed: true })
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]
    const pts: Array<[number, number]> = []
    s.steps.forEach((st, k) => {
      if (Number.isFinite(s.values[k])) pts.push([frame.x(st), frame.y(s.values[k])])
    })
    svg.polyline(pts, { stroke: color, 'stroke-width': 1.5 })
    legend.push({ label: s.label, color })
  })
  drawLegend(svg, frame, legend)
  return svg.render()
}
