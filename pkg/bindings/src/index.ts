/**
 * Typed client bindings for the crashbench evaluation service.
 *
 * The bindings are a facade over the HTTP API: no numeric work happens
 * client-side, so every value returned here is bit-identical to what the
 * service (and therefore the CLI) reports.  A problem handle is stateless
 * apart from its cached bounds; concurrent `evaluate` calls are safe
 * because the service isolates each evaluation in its own working
 * directory.
 */

export type ProblemNumber = 1 | 2 | 3;

export type ObjectiveName =
  | "sea"
  | "penalized_sea"
  | "mass"
  | "penalized_mass"
  | "load_uniformity"
  | "intrusion"
  | "absorbed_energy"
  | "peak_force"
  | "mean_force";

export type ErrorCategory = "usage" | "solver" | "parse";

export interface ProblemDescription {
  problem: ProblemNumber;
  dim: number;
  lower: number[];
  upper: number[];
  default_objectives: ObjectiveName[];
  known_objectives: ObjectiveName[];
  constraint_limit_mm: number | null;
  dimension_range: [number, number];
}

export interface EvaluationDetail {
  problem: ProblemNumber;
  dim: number;
  objectives: Record<string, number>;
  feasible: boolean;
  intrusion_mm: number;
  mass_kg: number;
  x_normalized: number[];
  x_physical: number[];
  work_dir: string;
}

export interface CreateProblemOptions {
  problem: ProblemNumber;
  dim: number;
  objectives?: ObjectiveName[];
  /** default true; set false together with solverPath for real solves */
  mock?: boolean;
  solverPath?: string;
  cores?: number;
  baseUrl?: string;
}

export class CrashBenchApiError extends Error {
  readonly category: ErrorCategory;
  readonly status: number;

  constructor(category: ErrorCategory, message: string, status: number) {
    super(message);
    this.name = "CrashBenchApiError";
    this.category = category;
    this.status = status;
  }
}

const DEFAULT_BASE_URL = "http://127.0.0.1:8321";
const NORM_LO = -5.0;
const NORM_HI = 5.0;

async function postJson(
  baseUrl: string,
  path: string,
  payload: unknown,
): Promise<any> {
  const resp = await fetch(`${baseUrl}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
  const body: any = await resp.json();
  if (!resp.ok) {
    const err = body?.error ?? {};
    const category: ErrorCategory = err.category ?? "usage";
    const message: string =
      err.message ?? `request failed with status ${resp.status}`;
    throw new CrashBenchApiError(category, message, resp.status);
  }
  return body;
}

export async function health(
  baseUrl: string = DEFAULT_BASE_URL,
): Promise<{ status: string; service: string; version: string }> {
  const resp = await fetch(`${baseUrl}/health`);
  if (!resp.ok) {
    throw new CrashBenchApiError("usage", `health check failed: ${resp.status}`, resp.status);
  }
  return (await resp.json()) as any;
}

export async function describeProblem(
  problem: ProblemNumber,
  dim: number,
  baseUrl: string = DEFAULT_BASE_URL,
): Promise<ProblemDescription> {
  return postJson(baseUrl, "/problems/describe", { problem, dim });
}

/** Affine map from the normalized domain [-5, 5]^d to physical mm. */
export function denormalize(
  x: readonly number[],
  lower: readonly number[],
  upper: readonly number[],
): number[] {
  if (x.length !== lower.length || x.length !== upper.length) {
    throw new CrashBenchApiError(
      "usage",
      `expected ${lower.length} components, got ${x.length}`,
      0,
    );
  }
  return x.map(
    (v, i) =>
      lower[i] + ((v - NORM_LO) / (NORM_HI - NORM_LO)) * (upper[i] - lower[i]),
  );
}

export class ProblemHandle {
  readonly description: ProblemDescription;
  private readonly options: CreateProblemOptions;
  private readonly baseUrl: string;

  constructor(description: ProblemDescription, options: CreateProblemOptions) {
    this.description = description;
    this.options = options;
    this.baseUrl = options.baseUrl ?? DEFAULT_BASE_URL;
  }

  get dim(): number {
    return this.description.dim;
  }

  get bounds(): { lower: number[]; upper: number[] } {
    return {
      lower: [...this.description.lower],
      upper: [...this.description.upper],
    };
  }

  denormalize(x: readonly number[]): number[] {
    return denormalize(x, this.description.lower, this.description.upper);
  }

  private checkVector(x: readonly number[]): void {
    if (x.length !== this.dim) {
      throw new CrashBenchApiError(
        "usage",
        `expected ${this.dim} components, got ${x.length}`,
        0,
      );
    }
    for (const v of x) {
      if (!Number.isFinite(v) || v < NORM_LO || v > NORM_HI) {
        throw new CrashBenchApiError(
          "usage",
          `component ${v} outside [${NORM_LO}, ${NORM_HI}]`,
          0,
        );
      }
    }
  }

  /** Full pipeline run; resolves to the complete evaluation record. */
  async evaluateDetailed(x: readonly number[]): Promise<EvaluationDetail> {
    this.checkVector(x);
    const payload: Record<string, unknown> = {
      problem: this.options.problem,
      dim: this.dim,
      x: [...x],
      mode: this.options.mock === false ? "external" : "mock",
      cores: this.options.cores ?? 1,
    };
    if (this.options.objectives) payload.objectives = this.options.objectives;
    if (this.options.solverPath) payload.solver_path = this.options.solverPath;
    return postJson(this.baseUrl, "/evaluate", payload);
  }

  /** Objective name -> value, exactly as the service computed them. */
  async evaluate(x: readonly number[]): Promise<Record<string, number>> {
    return (await this.evaluateDetailed(x)).objectives;
  }
}

/**
 * Create a problem handle.  The (problem, dim) pair is validated against
 * the service immediately, so an unsupported dimension rejects here
 * rather than at the first evaluation.
 */
export async function createProblem(
  options: CreateProblemOptions,
): Promise<ProblemHandle> {
  const baseUrl = options.baseUrl ?? DEFAULT_BASE_URL;
  const description = await describeProblem(
    options.problem,
    options.dim,
    baseUrl,
  );
  if (options.objectives) {
    for (const name of options.objectives) {
      if (!description.known_objectives.includes(name)) {
        throw new CrashBenchApiError(
          "usage",
          `unknown objective '${name}'`,
          0,
        );
      }
    }
  }
  return new ProblemHandle(description, options);
}
