/**
 * Minimal deterministic SVG document builder.
 *
 * Rendering is pure string assembly: identical inputs always produce
 * byte-identical documents, so figures can be diffed in CI.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 30, right: 140, bottom: 45, left: 60 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
];

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
    readonly margin: Margin = DEFAULT_MARGIN,
  ) {}

  get innerWidth(): number {
    return this.width - this.margin.left - this.margin.right;
  }

  get innerHeight(): number {
    return this.height - this.margin.top - this.margin.bottom;
  }

  path(d: string, stroke: string, width = 1.5, dash?: string): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${round(cx)}" cy="${round(cy)}" r="${r}" fill="${fill}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${round(x1)}" y1="${round(y1)}" x2="${round(x2)}" y2="${round(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { anchor?: string; size?: number; rotate?: boolean } = {},
  ): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? 11;
    const transform = opts.rotate ? ` transform="rotate(-90 ${round(x)} ${round(y)})"` : "";
    this.parts.push(
      `<text x="${round(x)}" y="${round(y)}" text-anchor="${anchor}" ` +
        `font-size="${size}" font-family="sans-serif"${transform}>${esc(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function round(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Log-axis tick values: powers of ten inside [lo, hi]. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (
    let e = Math.ceil(Math.log10(lo) - 1e-9);
    e <= Math.floor(Math.log10(hi) + 1e-9);
    e++
  ) {
    ticks.push(10 ** e);
  }
  return ticks;
}

export function fmtTick(v: number): string {
  const e = Math.log10(v);
  if (Number.isInteger(e) && (e < -2 || e > 3)) return `1e${e}`;
  return `${v}`;
}
