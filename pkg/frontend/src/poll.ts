/** Job polling with exponential backoff; one active loop per job. */

import type { ApiClient, JobStatus } from "./api";

export interface PollOptions {
  initialMs?: number;
  maxMs?: number;
  factor?: number;
  timeoutMs?: number;
  onUpdate?: (status: JobStatus) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollJob(
  client: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobStatus> {
  const initialMs = options.initialMs ?? 200;
  const maxMs = options.maxMs ?? 2000;
  const factor = options.factor ?? 1.6;
  const timeoutMs = options.timeoutMs ?? 300_000;
  const sleep = options.sleep ?? defaultSleep;

  let delay = initialMs;
  const startedAt = Date.now();
  for (;;) {
    const status = await client.getJob(jobId);
    options.onUpdate?.(status);
    if (status.state === "Done" || status.state === "Failed") {
      return status;
    }
    if (Date.now() - startedAt > timeoutMs) {
      throw new Error(`job ${jobId} still ${status.state} after ${timeoutMs}ms`);
    }
    await sleep(delay);
    delay = Math.min(maxMs, delay * factor);
  }
}
