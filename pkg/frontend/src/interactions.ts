/** Hover capture helpers: per-facet debounce and the offline send queue. */

export class InteractionGate {
  private last = new Map<string, number>();

  constructor(private windowMs: number = 100) {}

  /** One interact per facet per debounce window. */
  allow(facet: string, nowMs: number): boolean {
    const prev = this.last.get(facet);
    if (prev !== undefined && nowMs - prev < this.windowMs) {
      return false;
    }
    this.last.set(facet, nowMs);
    return true;
  }
}

/** Queues outbound messages while the socket is down; drained on reconnect. */
export class OutBox<T> {
  private queue: T[] = [];

  push(msg: T): void {
    this.queue.push(msg);
  }

  get size(): number {
    return this.queue.length;
  }

  drainTo(send: (msg: T) => void): number {
    const n = this.queue.length;
    for (const msg of this.queue) {
      send(msg);
    }
    this.queue = [];
    return n;
  }
}
