/** Server-sent-events subscription over fetch streams.
 *
 * EventSource is browser-only and cannot attach to an already-running vitest
 * process, so the parser is written against ReadableStream and works in both
 * the studio and node-based tests. Only `data:` frames are surfaced; comment
 * heartbeats (`: ping`) are ignored.
 */

export interface Subscription {
  close(): void;
  done: Promise<void>;
}

/** Incremental SSE parser: feed chunks, get complete event payloads back. */
export class SseParser {
  private buffer = "";

  push(chunk: string): string[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const events: string[] = [];
    let boundary = this.buffer.indexOf("\n\n");
    while (boundary >= 0) {
      const raw = this.buffer.slice(0, boundary);
      this.buffer = this.buffer.slice(boundary + 2);
      const data = raw
        .split("\n")
        .filter((line) => line.startsWith("data:"))
        .map((line) => line.slice(5).replace(/^ /, ""))
        .join("\n");
      if (data) events.push(data);
      boundary = this.buffer.indexOf("\n\n");
    }
    return events;
  }
}

export function subscribe(
  url: string,
  onEvent: (data: string) => void,
  onError?: (error: unknown) => void,
): Subscription {
  const controller = new AbortController();

  const done = (async () => {
    try {
      const response = await fetch(url, {
        signal: controller.signal,
        headers: { accept: "text/event-stream" },
      });
      if (!response.ok || !response.body) {
        throw new Error(`stream unavailable (HTTP ${response.status})`);
      }
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const parser = new SseParser();
      for (;;) {
        const { done: finished, value } = await reader.read();
        if (finished) break;
        for (const data of parser.push(decoder.decode(value, { stream: true }))) {
          onEvent(data);
        }
      }
    } catch (error) {
      if (!controller.signal.aborted) onError?.(error);
    }
  })();

  return {
    close: () => controller.abort(),
    done,
  };
}
