/**
 * Admissible-region figure: shaded (p, q) raster with the boundary overlays
 * p = 2, q = 2, and the data-inferred critical sum p + q = 2_alpha^*.
 */

import { RegionRaster, inferSumBound } from "./region.js";
import { encodePng } from "./png.js";
import { PlotFrame, axes, line, niceTicks, rect, svgDocument, text, xPixel, yPixel } from "./svg.js";

const FILL_ADMISSIBLE = "#4878a8";
const RGB_ADMISSIBLE: [number, number, number] = [72, 120, 168];
const RGB_EMPTY: [number, number, number] = [255, 255, 255];

export function renderRegionSvg(raster: RegionRaster): string {
    const { axis, admissible } = raster;
    const lo = axis[0];
    const hi = axis[axis.length - 1];
    const frame: PlotFrame = {
        width: 480,
        height: 460,
        margin: { top: 30, right: 20, bottom: 46, left: 56 },
        xDomain: [lo, hi],
        yDomain: [lo, hi],
    };
    const step = axis.length > 1 ? axis[1] - axis[0] : 1;
    const parts: string[] = [];
    const cellW = Math.abs(xPixel(frame, lo + step) - xPixel(frame, lo));
    const cellH = Math.abs(yPixel(frame, lo + step) - yPixel(frame, lo));
    for (let i = 0; i < axis.length; i++) {
        for (let j = 0; j < axis.length; j++) {
            if (!admissible[i][j]) continue;
            const x = xPixel(frame, axis[i] - step / 2);
            const y = yPixel(frame, axis[j] + step / 2);
            parts.push(rect(x, y, cellW, cellH, FILL_ADMISSIBLE));
        }
    }

    const top = yPixel(frame, hi);
    const bottom = yPixel(frame, lo);
    const left = xPixel(frame, lo);
    const right = xPixel(frame, hi);
    if (lo <= 2 && 2 <= hi) {
        parts.push(line(xPixel(frame, 2), bottom, xPixel(frame, 2), top, "#a03030", "5,3"));
        parts.push(line(left, yPixel(frame, 2), right, yPixel(frame, 2), "#a03030", "5,3"));
        parts.push(text(xPixel(frame, 2) + 4, top + 12, "p = 2", "start", 11));
        parts.push(text(right - 4, yPixel(frame, 2) - 5, "q = 2", "end", 11));
    }
    const sumBound = inferSumBound(raster);
    if (sumBound !== null) {
        // clip the diagonal p + q = sumBound to the plotted square
        const pA = Math.max(lo, sumBound - hi);
        const pB = Math.min(hi, sumBound - lo);
        if (pA < pB) {
            parts.push(
                line(xPixel(frame, pA), yPixel(frame, sumBound - pA), xPixel(frame, pB), yPixel(frame, sumBound - pB), "#207020", "5,3"),
            );
            const mid = (pA + pB) / 2;
            parts.push(text(xPixel(frame, mid) + 6, yPixel(frame, sumBound - mid) - 6, "p + q = 2*_a", "start", 11));
        }
    }

    const ticks = niceTicks([lo, hi]);
    parts.push(axes(frame, ticks, ticks, "p", "q"));
    parts.push(text(frame.width / 2, 18, "Admissible (p, q) region", "middle", 13));
    return svgDocument(frame.width, frame.height, parts.join("\n"));
}

/** Direct pixel raster of the region table (one cell per sample). */
export function renderRegionPng(raster: RegionRaster, scale = 8): Buffer {
    const m = raster.axis.length;
    const size = m * scale;
    const pixels = new Uint8Array(size * size * 3);
    for (let py = 0; py < size; py++) {
        // image row 0 is the largest q
        const j = m - 1 - Math.floor(py / scale);
        for (let px = 0; px < size; px++) {
            const i = Math.floor(px / scale);
            const color = raster.admissible[i][j] ? RGB_ADMISSIBLE : RGB_EMPTY;
            const base = (py * size + px) * 3;
            pixels[base] = color[0];
            pixels[base + 1] = color[1];
            pixels[base + 2] = color[2];
        }
    }
    return encodePng(size, size, pixels);
}
