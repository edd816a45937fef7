/**
 * Reader for the raw field files emitted by the solver.
 *
 * Layout (little-endian): magic "CHQF", format version (u32), N (u32),
 * n per axis (u32), box half-width L (f64), then n^N float64 values in
 * row-major order.
 */

export interface FieldData {
    /** Spatial dimension (1, 2, or 3). */
    N: number;
    /** Points per axis. */
    n: number;
    /** Box half-width; the box is [-L, L)^N with spacing h = 2L/n. */
    L: number;
    /** n^N values, row-major. */
    values: Float64Array;
}

const MAGIC = "CHQF";
const SUPPORTED_VERSION = 1;

export function parseField(buffer: Buffer): FieldData {
    if (buffer.length < 24) {
        throw new Error("field file too short");
    }
    if (buffer.toString("latin1", 0, 4) !== MAGIC) {
        throw new Error("not a CHQF field file (bad magic)");
    }
    const version = buffer.readUInt32LE(4);
    if (version !== SUPPORTED_VERSION) {
        throw new Error(`unsupported CHQF version ${version}`);
    }
    const N = buffer.readUInt32LE(8);
    const n = buffer.readUInt32LE(12);
    const L = buffer.readDoubleLE(16);
    const count = n ** N;
    const expected = 24 + 8 * count;
    if (buffer.length !== expected) {
        throw new Error(`field file length ${buffer.length} != expected ${expected}`);
    }
    const values = new Float64Array(count);
    for (let i = 0; i < count; i++) {
        values[i] = buffer.readDoubleLE(24 + 8 * i);
    }
    return { N, n, L, values };
}

/** Lattice spacing of the field's grid. */
export function spacing(field: FieldData): number {
    return (2 * field.L) / field.n;
}
