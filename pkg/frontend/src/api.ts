/** Typed client for the trace service HTTP API. */

export interface TraceRequest {
  repo: string;
  commit: string;
  file: string;
  method: string;
  line: number;
}

export type JobStateName = "Queued" | "Cloning" | "Tracing" | "Done" | "Failed";

export interface JobStatus {
  id: string;
  state: JobStateName;
  submitted_at: string;
  finished_at: string | null;
  transitions: string[];
  error?: { code: string; message: string };
}

export interface HistoryRecord {
  hash: string;
  parents: string[];
  author_name: string;
  author_email: string;
  commit_time: string;
  message: string;
  contributor: string;
  kinds: string[];
  file_before: string;
  file_after: string;
  name_before: string;
  name_after: string;
  start_line_after: number;
}

export interface HistoryDocument {
  schema_version: string;
  repository: string;
  origin_commit: string;
  file: string;
  method: string;
  start_line: number;
  records: HistoryRecord[];
  complete: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: unknown,
  ) {
    super(`API error ${status}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private fetchImpl: FetchLike;

  constructor(
    private baseUrl = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: unknown = null;
      try {
        payload = await response.json();
      } catch {
        payload = await response.text().catch(() => null);
      }
      throw new ApiError(response.status, payload);
    }
    return response;
  }

  async submitTrace(request: TraceRequest): Promise<string> {
    const response = await this.request("/api/v1/trace", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    const body = (await response.json()) as { job_id: string };
    return body.job_id;
  }

  async getJob(jobId: string): Promise<JobStatus> {
    const response = await this.request(`/api/v1/jobs/${jobId}`);
    return (await response.json()) as JobStatus;
  }

  async getResult(jobId: string): Promise<HistoryDocument> {
    const response = await this.request(`/api/v1/jobs/${jobId}/result`);
    return (await response.json()) as HistoryDocument;
  }

  async getDiff(repo: string, commit: string, parent: string, file: string): Promise<string> {
    const params = new URLSearchParams({ repo, commit, parent, file });
    const response = await this.request(`/api/v1/diff?${params.toString()}`);
    return await response.text();
  }
}
