/**
 * Minimal PNG encoder (8-bit RGB, no interlace) built on node's zlib.
 * Deterministic for fixed input, which keeps regenerated figures
 * byte-identical.
 */

import { deflateSync } from "node:zlib";

const SIGNATURE = Buffer.from([137, 80, 78, 71, 13, 10, 26, 10]);

let crcTable: Uint32Array | null = null;

function getCrcTable(): Uint32Array {
    if (crcTable === null) {
        crcTable = new Uint32Array(256);
        for (let i = 0; i < 256; i++) {
            let c = i;
            for (let k = 0; k < 8; k++) {
                c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
            }
            crcTable[i] = c >>> 0;
        }
    }
    return crcTable;
}

export function crc32(data: Buffer): number {
    const table = getCrcTable();
    let c = 0xffffffff;
    for (let i = 0; i < data.length; i++) {
        c = table[(c ^ data[i]) & 0xff] ^ (c >>> 8);
    }
    return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
    const header = Buffer.alloc(4);
    header.writeUInt32BE(data.length, 0);
    const body = Buffer.concat([Buffer.from(type, "latin1"), data]);
    const crc = Buffer.alloc(4);
    crc.writeUInt32BE(crc32(body), 0);
    return Buffer.concat([header, body, crc]);
}

/**
 * Encode an RGB image; `pixels` holds 3 bytes per pixel, row-major.
 */
export function encodePng(width: number, height: number, pixels: Uint8Array): Buffer {
    if (pixels.length !== width * height * 3) {
        throw new Error(`pixel buffer length ${pixels.length} != ${width * height * 3}`);
    }
    const ihdr = Buffer.alloc(13);
    ihdr.writeUInt32BE(width, 0);
    ihdr.writeUInt32BE(height, 4);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 2; // color type: truecolor
    ihdr[10] = 0; // compression
    ihdr[11] = 0; // filter
    ihdr[12] = 0; // interlace

    const stride = width * 3;
    const raw = Buffer.alloc(height * (stride + 1));
    for (let row = 0; row < height; row++) {
        raw[row * (stride + 1)] = 0; // filter: none
        raw.set(pixels.subarray(row * stride, (row + 1) * stride), row * (stride + 1) + 1);
    }
    return Buffer.concat([
        SIGNATURE,
        chunk("IHDR", ihdr),
        chunk("IDAT", deflateSync(raw)),
        chunk("IEND", Buffer.alloc(0)),
    ]);
}
