/**
 * Small deterministic SVG builder. Same data in, same bytes out: no
 * timestamps, no randomness, fixed number formatting throughout.
 */

export const WIDTH = 720
export const HEIGHT = 420
export const MARGIN = { top: 28, right: 20, bottom: 46, left: 68 }

export const PALETTE = [
  '#d97706', // orange
  '#2563eb', // blue
  '#16a34a', // green
  '#7c3aed', // purple
  '#db2777', // pink
  '#0891b2', // teal
]

/** Coordinate formatting: 2 decimal places, no negative zero. */
export function fmtCoord(v: number): string {
  const s = v.toFixed(2)
  return s === '-0.00' ? '0.00' : s
}

/** Tick/legend value formatting: short and stable. */
export function fmtValue(v: number): string {
  if (!Number.isFinite(v)) return String(v)
  if (v === 0) return '0'
  const a = Math.abs(v)
  if (a >= 1e5 || a < 1e-3) return v.toExponential(1).replace('e+', 'e')
  const s = v.toPrecision(4)
  return s.includes('.') ? s.replace(/\.?0+$/, '') : s
}

export type Scale = (v: number) => number

export function scaleLinear(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0
  if (span === 0) return () => (r0 + r1) / 2
  return (v) => r0 + ((v - d0) / span) * (r1 - r0)
}

export function scaleLog10(d0: number, d1: number, r0: number, r1: number): Scale {
  const lin = scaleLinear(Math.log10(d0), Math.log10(d1), r0, r1)
  return (v) => lin(Math.log10(v))
}

/** Round-number ticks covering [min, max], at most `count` of them. */
export function niceTicks(min: number, max: number, count = 6): number[] {
  if (!(max > min)) return [min]
  const rawStep = (max - min) / Math.max(count - 1, 1)
  const mag = 10 ** Math.floor(Math.log10(rawStep))
  let step = mag
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag
      break
    }
  }
  const ticks: number[] = []
  let t = Math.ceil(min / step) * step
  for (; t <= max + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t)
  }
  return ticks
}

export function logTicks(min: number, max: number): number[] {
  const lo = Math.floor(Math.log10(min))
  const hi = Math.ceil(Math.log10(max))
  const ticks: number[] = []
  for (let e = lo; e <= hi; e++) ticks.push(10 ** e)
  return ticks.filter((t) => t >= min / 1.0001 && t <= max * 1.0001)
}

type Attrs = Record<string, string | number>

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join('')
}

export class Svg {
  private parts: string[] = []

  constructor(
    readonly width = WIDTH,
    readonly height = HEIGHT,
  ) {}

  raw(s: string) {
    this.parts.push(s)
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs) {
    this.raw(
      `<line x1="${fmtCoord(x1)}" y1="${fmtCoord(y1)}" x2="${fmtCoord(x2)}" y2="${fmtCoord(y2)}"${attrString(attrs)}/>`,
    )
  }

  rect(x: number, y: number, w: number, h: number, attrs: Attrs) {
    this.raw(
      `<rect x="${fmtCoord(x)}" y="${fmtCoord(y)}" width="${fmtCoord(w)}" height="${fmtCoord(h)}"${attrString(attrs)}/>`,
    )
  }

  polyline(pts: Array<[number, number]>, attrs: Attrs) {
    const p = pts.map(([x, y]) => `${fmtCoord(x)},${fmtCoord(y)}`).join(' ')
    this.raw(`<polyline points="${p}" fill="none"${attrString(attrs)}/>`)
  }

  /** Closed filled band between an upper and a lower series. */
  band(upper: Array<[number, number]>, lower: Array<[number, number]>, attrs: Attrs) {
    const fwd = upper.map(([x, y]) => `${fmtCoord(x)},${fmtCoord(y)}`)
    const back = [...lower].reverse().map(([x, y]) => `${fmtCoord(x)},${fmtCoord(y)}`)
    this.raw(`<polygon points="${[...fwd, ...back].join(' ')}"${attrString(attrs)}/>`)
  }

  circle(cx: number, cy: number, r: number, attrs: Attrs) {
    this.raw(`<circle cx="${fmtCoord(cx)}" cy="${fmtCoord(cy)}" r="${fmtCoord(r)}"${attrString(attrs)}/>`)
  }

  text(x: number, y: number, s: string, attrs: Attrs = {}) {
    const esc = s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    this.raw(`<text x="${fmtCoord(x)}" y="${fmtCoord(y)}"${attrString(attrs)}>${esc}</text>`)
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="#ffffff"/>`,
      ...this.parts,
      '</svg>',
    ].join('\n')
  }
}

export interface Frame {
  x: Scale
  y: Scale
  plot: { x0: number; x1: number; y0: number; y1: number }
}

export interface FrameOpts {
  xDomain: [number, number]
  yDomain: [number, number]
  xLabel: string
  yLabel: string
  title?: string
  logY?: boolean
  xTickValues?: number[]
  xTickLabels?: string[]
}

/** Axes, ticks and labels for a standard single-panel chart. */
export function chartFrame(svg: Svg, opts: FrameOpts): Frame {
  const x0 = MARGIN.left
  const x1 = svg.width - MARGIN.right
  const y0 = svg.height - MARGIN.bottom
  const y1 = MARGIN.top
  const x = scaleLinear(opts.xDomain[0], opts.xDomain[1], x0, x1)
  const y = opts.logY
    ? scaleLog10(opts.yDomain[0], opts.yDomain[1], y0, y1)
    : scaleLinear(opts.yDomain[0], opts.yDomain[1], y0, y1)

  svg.rect(x0, y1, x1 - x0, y0 - y1, { fill: 'none', stroke: '#444444', 'stroke-width': 1 })

  const xticks = opts.xTickValues ?? niceTicks(opts.xDomain[0], opts.xDomain[1])
  xticks.forEach((t, i) => {
    const px = x(t)
    svg.line(px, y0, px, y0 + 5, { stroke: '#444444', 'stroke-width': 1 })
    const label = opts.xTickLabels ? opts.xTickLabels[i] : fmtValue(t)
    svg.text(px, y0 + 18, label, { 'text-anchor': 'middle', 'font-size': 11, fill: '#222222' })
  })
  const yticks = opts.logY
    ? logTicks(opts.yDomain[0], opts.yDomain[1])
    : niceTicks(opts.yDomain[0], opts.yDomain[1])
  for (const t of yticks) {
    const py = y(t)
    svg.line(x0 - 5, py, x0, py, { stroke: '#444444', 'stroke-width': 1 })
    svg.line(x0, py, x1, py, { stroke: '#eeeeee', 'stroke-width': 1 })
    svg.text(x0 - 8, py + 3.5, fmtValue(t), { 'text-anchor': 'end', 'font-size': 11, fill: '#222222' })
  }

  svg.text((x0 + x1) / 2, svg.height - 10, opts.xLabel, {
    'text-anchor': 'middle',
    'font-size': 12,
    fill: '#222222',
  })
  svg.text(14, (y0 + y1) / 2, opts.yLabel, {
    'text-anchor': 'middle',
    'font-size': 12,
    fill: '#222222',
    transform: `rotate(-90 14 ${fmtCoord((y0 + y1) / 2)})`,
  })
  if (opts.title) {
    svg.text((x0 + x1) / 2, 18, opts.title, { 'text-anchor': 'middle', 'font-size': 13, fill: '#111111' })
  }
  return { x, y, plot: { x0, x1, y0, y1 } }
}

export interface LegendEntry {
  label: string
  color: string
  dashed?: boolean
}

export function drawLegend(svg: Svg, frame: Frame, entries: LegendEntry[]) {
  let ty = frame.plot.y1 + 14
  const tx = frame.plot.x0 + 10
  for (const e of entries) {
    svg.line(tx, ty - 4, tx + 22, ty - 4, {
      stroke: e.color,
      'stroke-width': 2,
      ...(e.dashed ? { 'stroke-dasharray': '6 4' } : {}),
    })
    svg.text(tx + 28, ty, e.label, { 'font-size': 11, fill: '#222222' })
    ty += 16
  }
}
