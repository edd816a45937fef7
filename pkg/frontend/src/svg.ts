/**
 * Minimal deterministic SVG construction: fixed margins, fixed precision,
 * no timestamps, so regenerating an unchanged figure is byte-identical.
 */

export interface PlotFrame {
    width: number;
    height: number;
    margin: { top: number; right: number; bottom: number; left: number };
    xDomain: [number, number];
    yDomain: [number, number];
}

export function xPixel(frame: PlotFrame, x: number): number {
    const { margin, width, xDomain } = frame;
    const span = width - margin.left - margin.right;
    return margin.left + ((x - xDomain[0]) / (xDomain[1] - xDomain[0])) * span;
}

export function yPixel(frame: PlotFrame, y: number): number {
    const { margin, height, yDomain } = frame;
    const span = height - margin.top - margin.bottom;
    return height - margin.bottom - ((y - yDomain[0]) / (yDomain[1] - yDomain[0])) * span;
}

export function fmt(value: number): string {
    return value.toFixed(2);
}

/** Round-trip friendly tick label (strips float noise). */
export function tickLabel(value: number): string {
    return Number(value.toPrecision(6)).toString();
}

export function polyline(points: Array<[number, number]>, stroke: string, width = 1.5): string {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    return `<polyline fill="none" stroke="${stroke}" stroke-width="${width}" points="${path}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke: string, dash = ""): string {
    const dashAttr = dash === "" ? "" : ` stroke-dasharray="${dash}"`;
    return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="1.2"${dashAttr}/>`;
}

export function text(x: number, y: number, content: string, anchor = "middle", size = 12): string {
    return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica, Arial, sans-serif" font-size="${size}" text-anchor="${anchor}">${content}</text>`;
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
    return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
}

export function axes(frame: PlotFrame, xTicks: number[], yTicks: number[], xLabel: string, yLabel: string): string {
    const parts: string[] = [];
    const x0 = frame.margin.left;
    const x1 = frame.width - frame.margin.right;
    const y0 = frame.height - frame.margin.bottom;
    const y1 = frame.margin.top;
    parts.push(line(x0, y0, x1, y0, "#000"));
    parts.push(line(x0, y0, x0, y1, "#000"));
    for (const t of xTicks) {
        const px = xPixel(frame, t);
        parts.push(line(px, y0, px, y0 + 5, "#000"));
        parts.push(text(px, y0 + 18, tickLabel(t)));
    }
    for (const t of yTicks) {
        const py = yPixel(frame, t);
        parts.push(line(x0 - 5, py, x0, py, "#000"));
        parts.push(text(x0 - 8, py + 4, tickLabel(t), "end"));
    }
    parts.push(text((x0 + x1) / 2, frame.height - 6, xLabel));
    parts.push(
        `<text x="14" y="${fmt((y0 + y1) / 2)}" font-family="Helvetica, Arial, sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})">${yLabel}</text>`,
    );
    return parts.join("\n");
}

export function svgDocument(width: number, height: number, body: string): string {
    return [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
        `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
        body,
        "</svg>",
        "",
    ].join("\n");
}

/** Evenly spaced ticks across a domain (about `count` of them). */
export function niceTicks(domain: [number, number], count = 6): number[] {
    const [lo, hi] = domain;
    const rawStep = (hi - lo) / count;
    const magnitude = 10 ** Math.floor(Math.log10(rawStep));
    const candidates = [1, 2, 2.5, 5, 10].map((m) => m * magnitude);
    const step = candidates.find((c) => (hi - lo) / c <= count) ?? candidates[candidates.length - 1];
    const first = Math.ceil(lo / step) * step;
    const ticks: number[] = [];
    for (let t = first; t <= hi + 1e-9; t += step) {
        ticks.push(Number(t.toPrecision(12)));
    }
    return ticks;
}
