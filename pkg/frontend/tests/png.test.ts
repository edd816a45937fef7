import { inflateSync } from "node:zlib";
import { describe, expect, it } from "vitest";

import { crc32, encodePng } from "../src/png.js";

function readChunks(png: Buffer): Array<{ type: string; data: Buffer; crc: number }> {
    const chunks = [];
    let offset = 8;
    while (offset < png.length) {
        const length = png.readUInt32BE(offset);
        const type = png.toString("latin1", offset + 4, offset + 8);
        const data = png.subarray(offset + 8, offset + 8 + length);
        const crc = png.readUInt32BE(offset + 8 + length);
        chunks.push({ type, data: Buffer.from(data), crc });
        offset += 12 + length;
    }
    return chunks;
}

describe("encodePng", () => {
    const width = 5;
    const height = 3;
    const pixels = new Uint8Array(width * height * 3);
    for (let i = 0; i < pixels.length; i++) pixels[i] = (i * 37) % 256;
    const png = encodePng(width, height, pixels);

    it("starts with the PNG signature", () => {
        expect([...png.subarray(0, 8)]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
    });

    it("has IHDR/IDAT/IEND with valid CRCs and dimensions", () => {
        const chunks = readChunks(png);
        expect(chunks.map((c) => c.type)).toEqual(["IHDR", "IDAT", "IEND"]);
        for (const c of chunks) {
            const body = Buffer.concat([Buffer.from(c.type, "latin1"), c.data]);
            expect(crc32(body)).toBe(c.crc);
        }
        const ihdr = chunks[0].data;
        expect(ihdr.readUInt32BE(0)).toBe(width);
        expect(ihdr.readUInt32BE(4)).toBe(height);
        expect(ihdr[8]).toBe(8); // bit depth
        expect(ihdr[9]).toBe(2); // RGB
    });

    it("inflates back to the original scanlines", () => {
        const chunks = readChunks(png);
        const raw = inflateSync(chunks[1].data);
        const stride = width * 3;
        expect(raw.length).toBe(height * (stride + 1));
        for (let row = 0; row < height; row++) {
            expect(raw[row * (stride + 1)]).toBe(0); // filter byte
            const line = raw.subarray(row * (stride + 1) + 1, (row + 1) * (stride + 1));
            expect([...line]).toEqual([...pixels.subarray(row * stride, (row + 1) * stride)]);
        }
    });

    it("is deterministic", () => {
        expect(encodePng(width, height, pixels).equals(png)).toBe(true);
    });

    it("rejects a mismatched buffer", () => {
        expect(() => encodePng(4, 4, new Uint8Array(5))).toThrow(/length/);
    });
});
