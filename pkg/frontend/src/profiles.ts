/**
 * Radial-profile and convergence figures from solver artifacts.
 *
 * Strictly a consumer: fields and histories are read from CHQF/JSON files;
 * the only computation here is presentation-level binning of field values by
 * distance from the peak.
 */

import { FieldData, spacing } from "./chqf.js";
import { PlotFrame, axes, niceTicks, polyline, svgDocument, text, xPixel, yPixel } from "./svg.js";

export interface ProfileSeries {
    name: string;
    radii: number[];
    values: number[];
}

export interface HistorySeries {
    name: string;
    residuals: number[];
}

const SERIES_COLORS: Record<string, string> = {
    u: "#1f5fa8",
    v: "#c05020",
    w: "#207040",
};

const FALLBACK_COLORS = ["#6040a0", "#a08020", "#208080"];

function color(name: string, index: number): string {
    return SERIES_COLORS[name] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

/**
 * Bin field values by minimal-image distance from the lattice argmax.
 * Returns bin-mean values on about `bins` shells.
 */
export function radialProfile(field: FieldData, name: string, bins = 160): ProfileSeries {
    const { N, n, values } = field;
    const h = spacing(field);
    let peak = 0;
    for (let i = 1; i < values.length; i++) {
        if (values[i] > values[peak]) peak = i;
    }
    const peakIndex: number[] = [];
    let rest = peak;
    for (let axis = N - 1; axis >= 0; axis--) {
        peakIndex[axis] = rest % n;
        rest = Math.floor(rest / n);
    }
    const maxR = Math.sqrt(N) * field.L;
    const width = maxR / bins;
    const sums = new Float64Array(bins);
    const counts = new Float64Array(bins);
    const index: number[] = new Array(N).fill(0);
    for (let flat = 0; flat < values.length; flat++) {
        let rSq = 0;
        for (let axis = 0; axis < N; axis++) {
            let d = (index[axis] - peakIndex[axis]) % n;
            if (d < -n / 2) d += n;
            if (d >= n / 2) d -= n;
            rSq += (d * h) ** 2;
        }
        const bin = Math.min(bins - 1, Math.floor(Math.sqrt(rSq) / width));
        sums[bin] += values[flat];
        counts[bin] += 1;
        for (let axis = N - 1; axis >= 0; axis--) {
            index[axis] += 1;
            if (index[axis] < n) break;
            index[axis] = 0;
        }
    }
    const radii: number[] = [];
    const means: number[] = [];
    for (let b = 0; b < bins; b++) {
        if (counts[b] === 0) continue;
        radii.push((b + 0.5) * width);
        means.push(sums[b] / counts[b]);
    }
    return { name, radii, values: means };
}

export function renderProfilesSvg(series: ProfileSeries[]): string {
    if (series.length === 0) {
        throw new Error("no profile series to plot");
    }
    const maxR = Math.max(...series.map((s) => s.radii[s.radii.length - 1]));
    const maxV = Math.max(...series.map((s) => Math.max(...s.values)));
    const frame: PlotFrame = {
        width: 520,
        height: 380,
        margin: { top: 30, right: 20, bottom: 46, left: 64 },
        xDomain: [0, maxR],
        yDomain: [0, maxV * 1.05],
    };
    const parts: string[] = [];
    series.forEach((s, i) => {
        const pts: Array<[number, number]> = s.radii.map((r, k) => [
            xPixel(frame, r),
            yPixel(frame, s.values[k]),
        ]);
        parts.push(polyline(pts, color(s.name, i)));
        parts.push(text(frame.width - 30, 40 + 16 * i, s.name, "end", 12));
        parts.push(
            polyline(
                [
                    [frame.width - 60, 36 + 16 * i],
                    [frame.width - 36, 36 + 16 * i],
                ],
                color(s.name, i),
            ),
        );
    });
    parts.push(axes(frame, niceTicks(frame.xDomain), niceTicks(frame.yDomain, 5), "r", "value"));
    parts.push(text(frame.width / 2, 18, "Radial profiles", "middle", 13));
    return svgDocument(frame.width, frame.height, parts.join("\n"));
}

export function renderConvergenceSvg(histories: HistorySeries[]): string {
    const kept = histories.filter((h) => h.residuals.length > 1);
    if (kept.length === 0) {
        throw new Error("no residual histories to plot");
    }
    const logs = kept.map((h) => h.residuals.map((r) => Math.log10(Math.max(r, 1e-300))));
    const maxLen = Math.max(...kept.map((h) => h.residuals.length));
    const lo = Math.min(...logs.map((l) => Math.min(...l)));
    const hi = Math.max(...logs.map((l) => Math.max(...l)));
    const frame: PlotFrame = {
        width: 520,
        height: 380,
        margin: { top: 30, right: 20, bottom: 46, left: 64 },
        xDomain: [0, maxLen - 1],
        yDomain: [lo - 0.5, hi + 0.5],
    };
    const parts: string[] = [];
    kept.forEach((h, i) => {
        const pts: Array<[number, number]> = logs[i].map((v, k) => [
            xPixel(frame, k),
            yPixel(frame, v),
        ]);
        parts.push(polyline(pts, color(h.name, i)));
        parts.push(text(frame.width - 30, 40 + 16 * i, h.name, "end", 12));
        parts.push(
            polyline(
                [
                    [frame.width - 60, 36 + 16 * i],
                    [frame.width - 36, 36 + 16 * i],
                ],
                color(h.name, i),
            ),
        );
    });
    parts.push(
        axes(frame, niceTicks(frame.xDomain, 6), niceTicks(frame.yDomain, 6), "iteration", "log10 residual"),
    );
    parts.push(text(frame.width / 2, 18, "Solver convergence", "middle", 13));
    return svgDocument(frame.width, frame.height, parts.join("\n"));
}
