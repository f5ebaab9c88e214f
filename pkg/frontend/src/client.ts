/** WebSocket transport: feeds the view model and reconnects on loss. */

import { parseServerMessage, type Request } from "./protocol.js";
import type { ConsoleViewModel } from "./viewmodel.js";

const RECONNECT_DELAY_MS = 1000;

export class ConsoleClient {
  private ws: WebSocket | null = null;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly vm: ConsoleViewModel,
  ) {}

  start(): void {
    this.closed = false;
    this.connect();
  }

  stop(): void {
    this.closed = true;
    this.ws?.close();
  }

  private connect(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.vm.attachSender((req: Request) => {
        if (ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify(req));
      });
      this.vm.connectionChanged(true);
    };

    ws.onmessage = (event: MessageEvent<string>) => {
      const msg = parseServerMessage(event.data);
      if (msg !== null) this.vm.handleMessage(msg);
    };

    ws.onclose = () => {
      this.vm.connectionChanged(false);
      if (!this.closed) {
        setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
      }
    };

    ws.onerror = () => ws.close();
  }
}

export function defaultWsUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/ws`;
}
