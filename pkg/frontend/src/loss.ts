import { MetricsTable, toNum, runLabel } from './csv.js'
import { Svg, chartFrame, drawLegend, LegendEntry, PALETTE } from './svg.js'

export interface LossOpts {
  /** Moving-average window (in logged rows) for the dark smoothed line. */
  window: number
  logY?: boolean
  labels?: string[]
}

export function movingAverage(values: number[], window: number): number[] {
  if (window <= 1) return [...values]
  const out: number[] = new Array(values.length)
  let acc = 0
  const half = Math.floor(window / 2)
  // symmetric window, clipped at the ends
  for (let i = 0; i < values.length; i++) {
    const lo = Math.max(0, i - half)
    const hi = Math.min(values.length - 1, i + half)
    acc = 0
    for (let k = lo; k <= hi; k++) acc += values[k]
    out[i] = acc / (hi - lo + 1)
  }
  return out
}

/** Thin long series for plotting; keeps ends, deterministic stride. */
function thin<T>(arr: T[], maxPoints = 4000): T[] {
  if (arr.length <= maxPoints) return arr
  const stride = Math.ceil(arr.length / maxPoints)
  const out = arr.filter((_, i) => i % stride === 0)
  if (out[out.length - 1] !== arr[arr.length - 1]) out.push(arr[arr.length - 1])
  return out
}

/**
 * Loss curves: raw trace in a light tint, moving average on top, a dashed
 * marker where beta switches off, and a divergence marker if the run died.
 */
export function renderLoss(tables: MetricsTable[], opts: LossOpts): string {
  if (tables.length === 0) throw new Error('no input tables')

  interface Curve {
    label: string
    steps: number[]
    raw: number[]
    smooth: number[]
    betaOff: number | null
    divergedAt: number | null
  }

  const curves: Curve[] = tables.map((table, i) => {
    const rows = table.rows.filter((r) => r.phase !== 'diverged')
    if (rows.length === 0) throw new Error(`${table.path}: no loss rows`)
    const divRow = table.rows.find((r) => r.phase === 'diverged')
    const firstTest = rows.find((r) => r.phase === 'test')
    const steps = rows.map((r) => toNum(r.step))
    const raw = rows.map((r) => toNum(r.loss))
    return {
      label: opts.labels?.[i] ?? runLabel(table.path),
      steps,
      raw,
      smooth: movingAverage(raw, opts.window),
      betaOff: firstTest ? toNum(firstTest.step) : null,
      divergedAt: divRow ? toNum(divRow.step) : null,
    }
  })

  const allY = curves.flatMap((c) => c.raw).filter((v) => Number.isFinite(v) && (!opts.logY || v > 0))
  if (allY.length === 0) throw new Error('no finite loss values')
  let lo = Math.min(...allY)
  let hi = Math.max(...allY)
  if (opts.logY) {
    lo /= 1.5
    hi *= 1.5
  } else {
    const pad = (hi - lo || 1) * 0.06
    lo = Math.max(0, lo - pad)
    hi += pad
  }
  const xs = curves.flatMap((c) => [c.steps[0], c.steps[c.steps.length - 1]])

  const svg = new Svg()
  const frame = chartFrame(svg, {
    xDomain: [Math.min(...xs), Math.max(...xs)],
    yDomain: [lo, hi],
    xLabel: 'step',
    yLabel: 'loss',
    logY: opts.logY,
    title: `loss, smoothed over ${opts.window} rows`,
  })

  const clampY = (v: number) => Math.min(Math.max(v, lo), hi)
  const legend: LegendEntry[] = []
  curves.forEach((c, i) => {
    const color = PALETTE[i % PALETTE.length]
    const rawPts = thin(
      c.steps
        .map((s, k) => [s, c.raw[k]] as [number, number])
        .filter(([, v]) => Number.isFinite(v) && (!opts.logY || v > 0)),
    )
    svg.polyline(
      rawPts.map(([s, v]) => [frame.x(s), frame.y(clampY(v))]),
      { stroke: color, 'stroke-width': 1, 'stroke-opacity': 0.3 },
    )
    const smoothPts = thin(
      c.steps
        .map((s, k) => [s, c.smooth[k]] as [number, number])
        .filter(([, v]) => Number.isFinite(v) && (!opts.logY || v > 0)),
    )
    svg.polyline(
      smoothPts.map(([s, v]) => [frame.x(s), frame.y(clampY(v))]),
      { stroke: color, 'stroke-width': 2 },
    )
    legend.push({ label: c.label, color })
  })

  const betaOff = curves.map((c) => c.betaOff).find((b) => b !== null)
  if (betaOff !== null && betaOff !== undefined) {
    const bx = frame.x(betaOff)
    svg.line(bx, frame.plot.y1, bx, frame.plot.y0, {
      stroke: '#b91c1c',
      'stroke-width': 1.5,
      'stroke-dasharray': '6 4',
    })
    svg.text(bx + 4, frame.plot.y1 + 12, 'beta off', { 'font-size': 10, fill: '#b91c1c' })
  }
  for (const c of curves) {
    if (c.divergedAt !== null) {
      const dx = frame.x(c.divergedAt)
      svg.text(dx, frame.plot.y1 + 24, `diverged @ ${c.divergedAt}`, {
        'text-anchor': 'middle',
        'font-size': 10,
        fill: '#b91c1c',
      })
      svg.line(dx, frame.plot.y1, dx, frame.plot.y0, {
        stroke: '#b91c1c',
        'stroke-width': 1,
        'stroke-opacity': 0.5,
      })
    }
  }
  drawLegend(svg, frame, legend)
  return svg.render()
}
