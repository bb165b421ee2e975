import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";

function tempCsv(name: string, content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "figs-"));
  const p = join(dir, name);
  writeFileSync(p, content);
  return p;
}

describe("cli", () => {
  it("writes an SVG for a valid ecdf file", async () => {
    const input = tempCsv(
      "ecdf.csv",
      "evals,lra,fixed\n100,0.0,0.1\n1000,0.5,0.3\n",
    );
    const output = input.replace(/\.csv$/, ".svg");
    const code = await main([
      "--kind", "ecdf", "--input", input, "--output", output,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(output, "utf8")).toContain("<svg");
  });

  it("exits 1 on a missing column", async () => {
    const input = tempCsv("bad.csv", "x,y\n1,2\n");
    const code = await main([
      "--kind", "ecdf", "--input", input, "--output", input + ".svg",
    ]);
    expect(code).toBe(1);
  });

  it("exits 1 on a missing file", async () => {
    const code = await main([
      "--kind", "ode", "--input", "/nonexistent.csv", "--output", "/tmp/x.svg",
    ]);
    expect(code).toBe(1);
  });

  it("renders every kind from harness-schema fixtures", async () => {
    const fixtures: Record<string, string> = {
      success: "lam,success_rate,sp1\n8,1.0,1500.0\n16,0.5,4000.0\n",
      sp1: "lam,success_rate,sp1\n8,1.0,1500.0\n16,0.5,4000.0\n",
      history:
        "trial,t,evals,f_m,f_best,eta_m,eta_sigma,snr_m,snr_sigma,sigma,eig_min,eig_max\n" +
        "0,1,10,5.0,4.0,1.0,1.0,0.5,0.5,2.0,1.0,1.0\n" +
        "0,11,110,2.0,1.5,0.5,0.8,0.2,0.3,1.5,0.9,1.1\n",
      ode: "step,m,v\n0,3.0,2.0\n1000,1.0,0.5\n",
    };
    for (const [kind, content] of Object.entries(fixtures)) {
      const input = tempCsv(`${kind}.csv`, content);
      const output = input.replace(/\.csv$/, ".svg");
      const code = await main([
        "--kind", kind, "--input", input, "--output", output,
      ]);
      expect(code, kind).toBe(0);
      expect(readFileSync(output, "utf8")).toContain("</svg>");
    }
  });
});
