/** WebSocket client: feeds server frames into the store and reconnects on
 * close or rev gap (every connection starts with a fresh snapshot). */

import type { ControllerEventWire, ServerMsg } from "./protocol.js";
import { encodeEvent, parseServerMsg } from "./protocol.js";

export interface NetHooks {
  onMessage(msg: ServerMsg): void;
  onDesync(): void; // the store noticed a gap; connection() reconnects
  onOpen(): void;
  onClose(): void;
}

export class Connection {
  private ws: WebSocket | null = null;
  private url: string;
  private hooks: NetHooks;
  private closed = false;
  private retryDelay = 250;

  constructor(url: string, hooks: NetHooks) {
    this.url = url;
    this.hooks = hooks;
    this.open();
  }

  private open(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.retryDelay = 250;
      this.hooks.onOpen();
    };
    this.ws.onmessage = (event) => {
      const msg = parseServerMsg(String(event.data));
      if (msg) this.hooks.onMessage(msg);
    };
    this.ws.onclose = () => {
      this.hooks.onClose();
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryDelay);
        this.retryDelay = Math.min(this.retryDelay * 2, 4000);
      }
    };
  }

  /** Drop the socket; onclose schedules a reconnect with a fresh snapshot. */
  resync(): void {
    this.ws?.close();
  }

  send(event: ControllerEventWire): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeEvent(event));
    }
  }

  shutdown(): void {
    this.closed = true;
    this.ws?.close();
  }
}
