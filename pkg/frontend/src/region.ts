/**
 * Admissible-region raster: parsing and boundary inference.
 *
 * The CSV comes from the solver CLI with header "p,q,admissible" and one row
 * per (p, q) sample; admissible is 0 or 1.
 */

export interface RegionRaster {
    /** Sorted distinct p values (equal to the q values by construction). */
    axis: number[];
    /** admissible[i][j] for p = axis[i], q = axis[j]. */
    admissible: boolean[][];
}

export function parseRegionCsv(text: string): RegionRaster {
    const lines = text.trim().split(/\r?\n/);
    if (lines.length < 2 || lines[0].trim() !== "p,q,admissible") {
        throw new Error("malformed region CSV: expected header 'p,q,admissible'");
    }
    const rows: Array<[number, number, boolean]> = [];
    const axisSet = new Set<number>();
    for (const line of lines.slice(1)) {
        if (line.trim() === "") continue;
        const parts = line.split(",");
        if (parts.length !== 3) {
            throw new Error(`malformed region CSV row: '${line}'`);
        }
        const p = Number(parts[0]);
        const q = Number(parts[1]);
        const flag = parts[2].trim();
        if (!Number.isFinite(p) || !Number.isFinite(q) || (flag !== "0" && flag !== "1")) {
            throw new Error(`malformed region CSV row: '${line}'`);
        }
        rows.push([p, q, flag === "1"]);
        axisSet.add(p);
    }
    const axis = [...axisSet].sort((a, b) => a - b);
    const index = new Map(axis.map((v, i) => [v, i]));
    const admissible = axis.map(() => axis.map(() => false));
    for (const [p, q, ok] of rows) {
        const i = index.get(p);
        const j = index.get(q);
        if (i === undefined || j === undefined) {
            throw new Error("region CSV is not a full tensor raster");
        }
        admissible[i][j] = ok;
    }
    return { axis, admissible };
}

/**
 * Data-inferred critical sum p + q: the admissible region is bounded by
 * p + q < 2_alpha^*, so the boundary sits between the largest admissible sum
 * and the next raster diagonal.  Returns null for an empty region.
 */
export function inferSumBound(raster: RegionRaster): number | null {
    let best = -Infinity;
    const { axis, admissible } = raster;
    for (let i = 0; i < axis.length; i++) {
        for (let j = 0; j < axis.length; j++) {
            if (admissible[i][j]) {
                best = Math.max(best, axis[i] + axis[j]);
            }
        }
    }
    if (!Number.isFinite(best)) {
        return null;
    }
    const step = axis.length > 1 ? axis[1] - axis[0] : 0;
    return best + step / 2;
}

/** Nearest-sample admissibility lookup, for spot checks. */
export function admissibleAt(raster: RegionRaster, p: number, q: number): boolean {
    const pick = (target: number) => {
        let bestIndex = 0;
        let bestDist = Infinity;
        raster.axis.forEach((v, i) => {
            const d = Math.abs(v - target);
            if (d < bestDist) {
                bestDist = d;
                bestIndex = i;
            }
        });
        return bestIndex;
    };
    return raster.admissible[pick(p)][pick(q)];
}
