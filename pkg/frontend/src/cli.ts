/**
 * Figure CLI: consumes choquard-lab artifacts and writes SVG/PNG files.
 *
 *   plot-region  <region.csv>  --out <dir>
 *   plot-profiles <run-dir>    --out <dir>
 *
 * The run directory is the output of `choquard-lab verify` (subdirectories
 * scalar/, system/, picard/ holding .chqf fields and solve_report.json).
 */

import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { parseField } from "./chqf.js";
import { HistorySeries, ProfileSeries, radialProfile, renderConvergenceSvg, renderProfilesSvg } from "./profiles.js";
import { parseRegionCsv } from "./region.js";
import { renderRegionPng, renderRegionSvg } from "./regionPlot.js";

function parseArgs(argv: string[]): { command: string; input: string; out: string } {
    const [command, ...rest] = argv;
    const positional: string[] = [];
    let out = "";
    for (let i = 0; i < rest.length; i++) {
        if (rest[i] === "--out") {
            out = rest[i + 1] ?? "";
            i += 1;
        } else {
            positional.push(rest[i]);
        }
    }
    if (!command || positional.length !== 1 || out === "") {
        throw new Error("usage: plot-region <region.csv> --out <dir> | plot-profiles <run-dir> --out <dir>");
    }
    return { command, input: positional[0], out };
}

export function plotRegion(csvPath: string, outDir: string): string[] {
    const raster = parseRegionCsv(readFileSync(csvPath, "utf-8"));
    mkdirSync(outDir, { recursive: true });
    const svgPath = join(outDir, "region.svg");
    const pngPath = join(outDir, "region.png");
    writeFileSync(svgPath, renderRegionSvg(raster));
    writeFileSync(pngPath, renderRegionPng(raster));
    return [svgPath, pngPath];
}

export function plotProfiles(runDir: string, outDir: string): string[] {
    const fieldSources: Array<[string, string]> = [
        ["u", join(runDir, "system", "u.chqf")],
        ["v", join(runDir, "system", "v.chqf")],
        ["w", join(runDir, "scalar", "w.chqf")],
    ];
    const profiles: ProfileSeries[] = [];
    const missing: string[] = [];
    for (const [name, path] of fieldSources) {
        if (!existsSync(path)) {
            missing.push(path);
            continue;
        }
        profiles.push(radialProfile(parseField(readFileSync(path)), name));
    }
    const histories: HistorySeries[] = [];
    for (const mode of ["scalar", "system", "picard"]) {
        const path = join(runDir, mode, "solve_report.json");
        if (!existsSync(path)) {
            missing.push(path);
            continue;
        }
        const report = JSON.parse(readFileSync(path, "utf-8"));
        histories.push({ name: mode, residuals: report.residual_history as number[] });
    }
    if (profiles.length === 0 || histories.length === 0) {
        throw new Error(`missing input files: ${missing.join(", ")}`);
    }
    for (const path of missing) {
        console.error(`warning: missing ${path}`);
    }
    mkdirSync(outDir, { recursive: true });
    const profilesPath = join(outDir, "profiles.svg");
    const convergencePath = join(outDir, "convergence.svg");
    writeFileSync(profilesPath, renderProfilesSvg(profiles));
    writeFileSync(convergencePath, renderConvergenceSvg(histories));
    return [profilesPath, convergencePath];
}

export function main(argv: string[]): number {
    let parsed;
    try {
        parsed = parseArgs(argv);
    } catch (err) {
        console.error((err as Error).message);
        return 2;
    }
    try {
        let written: string[];
        if (parsed.command === "plot-region") {
            written = plotRegion(parsed.input, parsed.out);
        } else if (parsed.command === "plot-profiles") {
            written = plotProfiles(parsed.input, parsed.out);
        } else {
            console.error(`unknown command '${parsed.command}'`);
            return 2;
        }
        for (const path of written) {
            console.log(`wrote ${path}`);
        }
        return 0;
    } catch (err) {
        console.error((err as Error).message);
        return 1;
    }
}

const invokedDirectly =
    process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
    process.exit(main(process.argv.slice(2)));
}
