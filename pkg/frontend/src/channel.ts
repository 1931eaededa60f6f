// Channel client: one persistent connection, commands up, acks and
// snapshots down. The transport is injectable so tests can run against a
// mock server; the browser uses a WebSocket.

import type { Ack, ChannelMessage, CommandBody } from './types.js';

export interface Transport {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
}

export interface ChannelEvents {
  hello?: (body: any) => void;
  snapshot?: (body: any) => void;
  ack?: (ack: Ack) => void;
  error?: (body: any) => void;
  closed?: () => void;
}

export class ChannelClient {
  private seq = 0;
  private pending = new Map<number, (ack: Ack) => void>();

  constructor(private transport: Transport, private events: ChannelEvents = {}) {
    transport.onMessage((text) => this.handle(text));
    transport.onClose(() => this.events.closed?.());
  }

  /** Send one command; resolves with its ack. */
  command(body: CommandBody): Promise<Ack> {
    this.seq += 1;
    const seq = this.seq;
    const message = { type: 'command', seq, body };
    return new Promise<Ack>((resolve) => {
      this.pending.set(seq, resolve);
      this.transport.send(JSON.stringify(message));
    });
  }

  close(): void {
    this.transport.close();
  }

  private handle(text: string): void {
    let message: ChannelMessage;
    try {
      message = JSON.parse(text);
    } catch {
      return; // servers never send non-JSON; ignore defensively
    }
    switch (message.type) {
      case 'hello':
        this.events.hello?.(message.body);
        break;
      case 'snapshot':
        this.events.snapshot?.(message.body);
        break;
      case 'ack': {
        const ack = message.body as Ack;
        const resolve = this.pending.get(ack.command_seq);
        if (resolve) {
          this.pending.delete(ack.command_seq);
          resolve(ack);
        }
        this.events.ack?.(ack);
        break;
      }
      case 'error':
        this.events.error?.(message.body);
        break;
    }
  }
}

/** Browser transport over a WebSocket. */
export function webSocketTransport(url: string): Transport {
  const ws = new WebSocket(url);
  const messageHandlers: ((text: string) => void)[] = [];
  const closeHandlers: (() => void)[] = [];
  ws.onmessage = (event) => {
    for (const handler of messageHandlers) handler(String(event.data));
  };
  ws.onclose = () => {
    for (const handler of closeHandlers) handler();
  };
  return {
    send(text) {
      ws.send(text);
    },
    close() {
      ws.close();
    },
    onMessage(handler) {
      messageHandlers.push(handler);
    },
    onClose(handler) {
      closeHandlers.push(handler);
    },
  };
}
