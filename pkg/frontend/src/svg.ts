/**
 * Minimal deterministic SVG chart builders (no DOM, no dependencies).
 * Output depends only on the inputs, so repeated builds are byte-identical.
 */

export interface Series {
  label: string;
  color: string;
  values: number[];
  dash?: string;
}

export interface LineChartOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  x: number[];
  series: Series[];
}

export interface BarChartOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  labels: string[];
  values: number[];
  color?: string;
}

const W = 700;
const H = 300;
const ML = 70;
const MR = 20;
const MT = 34;
const MB = 46;
const PW = W - ML - MR;
const PH = H - MT - MB;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 0.01; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e9) return `${(v / 1e9).toFixed(1)}G`;
  if (a >= 1e6) return `${(v / 1e6).toFixed(1)}M`;
  if (a >= 1e3) return `${(v / 1e3).toFixed(1)}k`;
  return a < 10 && v % 1 !== 0 ? v.toFixed(2) : String(v);
}

function frame(title: string, xLabel: string, yLabel: string): string {
  let s = "";
  s += `<text x="${ML}" y="18" font-size="11" font-weight="600" fill="#222">${esc(title)}</text>\n`;
  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + PW / 2}" y="${H - 8}" text-anchor="middle" font-size="9" fill="#444">${esc(xLabel)}</text>\n`;
  s += `<text x="14" y="${MT + PH / 2}" text-anchor="middle" font-size="9" fill="#444" transform="rotate(-90,14,${MT + PH / 2})">${esc(yLabel)}</text>\n`;
  return s;
}

function yAxis(yMax: number, yOf: (v: number) => number): string {
  let s = "";
  for (const v of niceTicks(0, yMax, 5)) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ML}" y1="${y}" x2="${ML + PW}" y2="${y}" stroke="#eee" stroke-width="0.5"/>\n`;
    s += `<text x="${ML - 5}" y="${(yOf(v) + 3).toFixed(1)}" text-anchor="end" font-size="8" fill="#666">${esc(fmt(v))}</text>\n`;
  }
  return s;
}

function legend(series: Series[]): string {
  let s = "";
  series.forEach((sr, i) => {
    const y = MT + 8 + i * 12;
    const x = ML + PW - 150;
    s += `<line x1="${x}" y1="${y}" x2="${x + 16}" y2="${y}" stroke="${sr.color}" stroke-width="1.5"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""}/>\n`;
    s += `<text x="${x + 20}" y="${y + 3}" font-size="8" fill="#444">${esc(sr.label)}</text>\n`;
  });
  return s;
}

function open(): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n<rect width="${W}" height="${H}" fill="#fff"/>\n`
  );
}

/** Line chart; with no data points it renders just the titled axes. */
export function buildLineChart(opts: LineChartOpts): string {
  const { x, series } = opts;
  let s = open();
  s += frame(opts.title, opts.xLabel, opts.yLabel);
  if (x.length > 0 && series.some((sr) => sr.values.length > 0)) {
    const xMin = Math.min(...x);
    const xMax = Math.max(...x);
    const yMax = Math.max(...series.flatMap((sr) => sr.values), 1e-12);
    const xOf = (v: number) => ML + ((v - xMin) / (xMax - xMin || 1)) * PW;
    const yOf = (v: number) => MT + PH - (v / yMax) * PH;
    s += yAxis(yMax, yOf);
    for (const v of niceTicks(xMin, xMax, 8)) {
      s += `<text x="${xOf(v).toFixed(1)}" y="${MT + PH + 12}" text-anchor="middle" font-size="8" fill="#666">${esc(fmt(v))}</text>\n`;
    }
    for (const sr of series) {
      const pts = sr.values
        .map((v, i) => `${xOf(x[i]).toFixed(1)},${yOf(v).toFixed(1)}`)
        .join(" ");
      s += `<polyline fill="none" stroke="${sr.color}" stroke-width="1.3"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""} points="${pts}"/>\n`;
    }
    s += legend(series);
  }
  return s + "</svg>\n";
}

/** Bar chart; with no bars it renders just the titled axes. */
export function buildBarChart(opts: BarChartOpts): string {
  const { labels, values } = opts;
  const color = opts.color ?? "#4361ee";
  let s = open();
  s += frame(opts.title, opts.xLabel, opts.yLabel);
  if (values.length > 0) {
    const yMax = Math.max(...values, 1e-12);
    const yOf = (v: number) => MT + PH - (v / yMax) * PH;
    s += yAxis(yMax, yOf);
    const slot = PW / values.length;
    const bw = Math.min(slot * 0.8, 48);
    values.forEach((v, i) => {
      const xc = ML + slot * (i + 0.5);
      const y = yOf(v);
      s += `<rect x="${(xc - bw / 2).toFixed(1)}" y="${y.toFixed(1)}" width="${bw.toFixed(1)}" height="${(MT + PH - y).toFixed(1)}" fill="${color}"/>\n`;
      if (labels.length <= 30) {
        s += `<text x="${xc.toFixed(1)}" y="${MT + PH + 12}" text-anchor="middle" font-size="8" fill="#666">${esc(labels[i])}</text>\n`;
      }
    });
  }
  return s + "</svg>\n";
}
