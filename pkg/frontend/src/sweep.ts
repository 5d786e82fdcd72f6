import { AggregateRow } from './csv.js'
import { Svg, chartFrame, drawLegend, fmtValue, PALETTE } from './svg.js'

export interface SweepOpts {
  /** Dashed horizontal reference, e.g. the undelayed run's test loss. */
  baseline?: number
  baselineLabel?: string
  logY?: boolean
  xLabel?: string
  title?: string
}

/** "steps=50" -> 50; "base" or non-numeric values -> null. */
export function cellValue(cell: string): number | null {
  const eq = cell.lastIndexOf('=')
  const v = Number(eq >= 0 ? cell.slice(eq + 1) : cell)
  return Number.isFinite(v) ? v : null
}

/**
 * Median line with a min..max band across sweep cells, one point per cell.
 * Cells named k=v with numeric v are placed at v on the x axis; otherwise
 * cells sit at their index with categorical tick labels.
 */
export function renderSweep(rows: AggregateRow[], opts: SweepOpts = {}): string {
  if (rows.length === 0) throw new Error('aggregate has no rows')
  const finite = rows.filter((r) => Number.isFinite(r.median))
  if (finite.length === 0) throw new Error('aggregate has no finite medians')

  const numeric = finite.every((r) => cellValue(r.cell) !== null)
  const pts = finite.map((r, i) => ({
    x: numeric ? (cellValue(r.cell) as number) : i,
    ...r,
  }))
  pts.sort((a, b) => a.x - b.x)

  const ys = pts.flatMap((p) => [p.min, p.max]).filter(Number.isFinite)
  if (opts.baseline !== undefined) ys.push(opts.baseline)
  let lo = Math.min(...ys)
  let hi = Math.max(...ys)
  if (opts.logY) {
    lo = lo > 0 ? lo / 1.5 : 1e-12
    hi = hi * 1.5
  } else {
    const pad = (hi - lo || 1) * 0.08
    lo -= pad
    hi += pad
  }

  const xs = pts.map((p) => p.x)
  const x0 = Math.min(...xs)
  const x1 = Math.max(...xs)
  const xpad = x0 === x1 ? 1 : (x1 - x0) * 0.05

  const svg = new Svg()
  const frame = chartFrame(svg, {
    xDomain: [x0 - xpad, x1 + xpad],
    yDomain: [lo, hi],
    xLabel: opts.xLabel ?? (numeric ? sweepAxisLabel(finite[0].cell) : 'cell'),
    yLabel: 'test loss',
    title: opts.title,
    logY: opts.logY,
    ...(numeric
      ? {}
      : { xTickValues: pts.map((p) => p.x), xTickLabels: pts.map((p) => p.cell) }),
  })

  const color = PALETTE[1]
  svg.band(
    pts.map((p) => [frame.x(p.x), frame.y(p.max)]),
    pts.map((p) => [frame.x(p.x), frame.y(p.min)]),
    { fill: color, 'fill-opacity': 0.18, stroke: 'none' },
  )
  svg.polyline(
    pts.map((p) => [frame.x(p.x), frame.y(p.median)]),
    { stroke: color, 'stroke-width': 2 },
  )
  for (const p of pts) {
    svg.circle(frame.x(p.x), frame.y(p.median), 3, { fill: color })
    if (p.diverged > 0) {
      svg.text(frame.x(p.x), frame.y(p.median) - 8, `${p.diverged}/${p.n} diverged`, {
        'text-anchor': 'middle',
        'font-size': 10,
        fill: '#b91c1c',
      })
    }
  }

  const legend = [{ label: `median, range over ${pts[0].n} seeds`, color }]
  if (opts.baseline !== undefined) {
    const by = frame.y(opts.baseline)
    svg.line(frame.plot.x0, by, frame.plot.x1, by, {
      stroke: PALETTE[3],
      'stroke-width': 1.5,
      'stroke-dasharray': '7 5',
    })
    legend.push({
      label: opts.baselineLabel ?? `undelayed baseline (${fmtValue(opts.baseline)})`,
      color: PALETTE[3],
    } as { label: string; color: string })
    ;(legend[legend.length - 1] as { dashed?: boolean }).dashed = true
  }
  drawLegend(svg, frame, legend)
  return svg.render()
}

function sweepAxisLabel(cell: string): string {
  const eq = cell.lastIndexOf('=')
  return eq >= 0 ? cell.slice(0, eq) : 'cell'
}
