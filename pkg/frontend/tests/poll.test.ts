import { describe, expect, test } from "vitest";

import type { ApiClient, JobStatus } from "../src/api";
import { pollJob } from "../src/poll";

function statusOf(state: JobStatus["state"]): JobStatus {
  return {
    id: "j1",
    state,
    submitted_at: "2023-11-14T22:00:00Z",
    finished_at: null,
    transitions: ["Queued"],
  };
}

function scriptedClient(states: JobStatus["state"][]): ApiClient {
  let index = 0;
  return {
    getJob: async () => statusOf(states[Math.min(index++, states.length - 1)]!),
  } as unknown as ApiClient;
}

describe("pollJob", () => {
  test("resolves once the job reaches Done", async () => {
    const seen: string[] = [];
    const status = await pollJob(scriptedClient(["Queued", "Cloning", "Tracing", "Done"]), "j1", {
      sleep: async () => {},
      onUpdate: (s) => seen.push(s.state),
    });
    expect(status.state).toBe("Done");
    expect(seen).toEqual(["Queued", "Cloning", "Tracing", "Done"]);
  });

  test("resolves on Failed without throwing", async () => {
    const status = await pollJob(scriptedClient(["Queued", "Failed"]), "j1", {
      sleep: async () => {},
    });
    expect(status.state).toBe("Failed");
  });

  test("backoff grows toward the cap", async () => {
    const delays: number[] = [];
    await pollJob(
      scriptedClient(["Queued", "Queued", "Queued", "Queued", "Queued", "Done"]),
      "j1",
      {
        initialMs: 100,
        maxMs: 400,
        factor: 2,
        sleep: async (ms) => {
          delays.push(ms);
        },
      },
    );
    expect(delays).toEqual([100, 200, 400, 400, 400]);
  });

  test("times out on a stuck job", async () => {
    let now = 0;
    const realNow = Date.now;
    Date.now = () => (now += 50_000);
    try {
      await expect(
        pollJob(scriptedClient(["Queued"]), "j1", { sleep: async () => {}, timeoutMs: 100_000 }),
      ).rejects.toThrow(/still Queued/);
    } finally {
      Date.now = realNow;
    }
  });
});
