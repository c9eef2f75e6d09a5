/** three.js view of the session picture.
 *
 * Anchors and objects render solid, ghosts as translucent overlays at the
 * poses the server reported; the lasso boundary and snap arcs are drawn
 * exactly as sent. Nothing here computes selection or snapping.
 */

import * as THREE from "three";
import type { ClientState } from "./state.js";
import type { PoseWire, SceneObjectWire, Vec3 } from "./protocol.js";

const ANCHOR_COLORS: Record<string, number> = {
  floor: 0x3a3f4a,
  sofa: 0x5a4632,
  shelf: 0x4a4f5a,
  basket: 0x6b5633,
};
const OBJECT_COLOR = 0x7aa2f7;
const FILLABLE_COLOR = 0x9ece6a;
const LIQUID_COLOR = 0x2ac3de;
const GHOST_COLOR = 0xbb9af7;

export class View {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;
  private anchorGroup = new THREE.Group();
  private objectMeshes = new Map<string, THREE.Mesh>();
  private liquidMeshes = new Map<string, THREE.Mesh>();
  private ghostMeshes = new Map<string, THREE.Mesh>();
  private lassoLine: THREE.Line | null = null;
  private arcGroup = new THREE.Group();
  private anchorsBuilt = false;

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.camera = new THREE.PerspectiveCamera(55, 1, 0.01, 100);
    this.camera.position.set(3.5, 3.0, 4.5);
    this.camera.lookAt(0, 0, 0);

    this.scene.background = new THREE.Color(0x16161e);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const sun = new THREE.DirectionalLight(0xffffff, 1.1);
    sun.position.set(4, 8, 3);
    this.scene.add(sun);
    this.scene.add(this.anchorGroup);
    this.scene.add(this.arcGroup);

    window.addEventListener("resize", () => this.resize());
    this.resize();
  }

  private resize(): void {
    const canvas = this.renderer.domElement;
    const width = canvas.clientWidth || window.innerWidth;
    const height = canvas.clientHeight || window.innerHeight;
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  private static applyPose(obj: THREE.Object3D, pose: PoseWire): void {
    obj.position.set(...pose.position);
    const [w, x, y, z] = pose.orientation;
    obj.quaternion.set(x, y, z, w);
  }

  private static boxMesh(half: Vec3, material: THREE.Material): THREE.Mesh {
    const mesh = new THREE.Mesh(new THREE.BoxGeometry(1, 1, 1), material);
    mesh.scale.set(2 * half[0], 2 * half[1], 2 * half[2]);
    return mesh;
  }

  private buildAnchors(state: ClientState): void {
    if (this.anchorsBuilt || !state.scene) return;
    for (const anchor of state.scene.anchors) {
      const color = ANCHOR_COLORS[anchor.label] ?? 0x414868;
      const mesh = View.boxMesh(
        anchor.half_extents,
        new THREE.MeshStandardMaterial({ color, roughness: 0.9 }),
      );
      View.applyPose(mesh, anchor.pose);
      this.anchorGroup.add(mesh);
    }
    this.anchorsBuilt = true;
  }

  /** Pose + vertical squash for a compressed box: the base face stays put. */
  private static placeCompressed(
    mesh: THREE.Mesh,
    pose: PoseWire,
    half: Vec3,
    factor: number,
  ): void {
    View.applyPose(mesh, pose);
    mesh.scale.set(2 * half[0], 2 * half[1] * factor, 2 * half[2]);
    const drop = new THREE.Vector3(0, -half[1] * (1 - factor), 0);
    drop.applyQuaternion(mesh.quaternion);
    mesh.position.add(drop);
  }

  private syncObjects(state: ClientState): void {
    if (!state.scene) return;
    for (const obj of state.scene.objects) {
      let mesh = this.objectMeshes.get(obj.id);
      if (!mesh) {
        const color = obj.fillable ? FILLABLE_COLOR : OBJECT_COLOR;
        mesh = View.boxMesh(
          obj.half_extents,
          new THREE.MeshStandardMaterial({ color, roughness: 0.6 }),
        );
        this.objectMeshes.set(obj.id, mesh);
        this.scene.add(mesh);
        if (obj.fillable) {
          const liquid = new THREE.Mesh(
            new THREE.BoxGeometry(1, 1, 1),
            new THREE.MeshStandardMaterial({ color: LIQUID_COLOR, roughness: 0.2 }),
          );
          this.liquidMeshes.set(obj.id, liquid);
          this.scene.add(liquid);
        }
      }
      const factor = obj.compressible?.current_factor ?? 1.0;
      View.placeCompressed(mesh, obj.pose, obj.half_extents, factor);
      const material = mesh.material as THREE.MeshStandardMaterial;
      material.emissive.setHex(
        state.selection.ids.includes(obj.id) ? 0x445588 : 0x000000,
      );
      const liquid = this.liquidMeshes.get(obj.id);
      if (liquid) this.placeLiquid(liquid, obj, obj.pose, obj.fillable?.fill_level ?? 0);
    }
  }

  private placeLiquid(
    liquid: THREE.Mesh,
    obj: SceneObjectWire,
    pose: PoseWire,
    level: number,
  ): void {
    const [hx, hy, hz] = obj.half_extents;
    liquid.visible = level > 1e-3;
    if (!liquid.visible) return;
    View.applyPose(liquid, pose);
    liquid.scale.set(2 * hx * 0.8, 2 * hy * level * 0.96, 2 * hz * 0.8);
    const lift = new THREE.Vector3(0, -hy + hy * level, 0);
    lift.applyQuaternion(liquid.quaternion);
    liquid.position.add(lift);
  }

  private syncGhosts(state: ClientState): void {
    const seen = new Set<string>();
    if (state.scene) {
      const objects = new Map(state.scene.objects.map((o) => [o.id, o]));
      for (const ghost of state.ghosts) {
        const obj = objects.get(ghost.object_id);
        if (!obj) continue;
        seen.add(ghost.object_id);
        let mesh = this.ghostMeshes.get(ghost.object_id);
        if (!mesh) {
          mesh = View.boxMesh(
            obj.half_extents,
            new THREE.MeshStandardMaterial({
              color: GHOST_COLOR,
              transparent: true,
              opacity: 0.45,
              depthWrite: false,
            }),
          );
          this.ghostMeshes.set(ghost.object_id, mesh);
          this.scene.add(mesh);
        }
        View.placeCompressed(
          mesh,
          ghost.pose,
          obj.half_extents,
          ghost.height_factor ?? 1.0,
        );
        const material = mesh.material as THREE.MeshStandardMaterial;
        material.opacity = ghost.phase === "grabbed" ? 0.7 : 0.45;
      }
    }
    for (const [id, mesh] of this.ghostMeshes) {
      if (!seen.has(id)) {
        this.scene.remove(mesh);
        this.ghostMeshes.delete(id);
      }
    }
  }

  private syncLasso(state: ClientState): void {
    if (this.lassoLine) {
      this.scene.remove(this.lassoLine);
      this.lassoLine = null;
    }
    const boundary = state.selection.boundary;
    if (boundary.length < 2) return;
    const points = boundary.map((p) => new THREE.Vector3(p[0], p[1] + 0.005, p[2]));
    if (state.selection.mode !== "drawing") points.push(points[0].clone());
    const geometry = new THREE.BufferGeometry().setFromPoints(points);
    this.lassoLine = new THREE.Line(
      geometry,
      new THREE.LineBasicMaterial({ color: 0xe0af68 }),
    );
    this.scene.add(this.lassoLine);
  }

  private syncArcs(state: ClientState): void {
    this.arcGroup.clear();
    for (const arc of state.arcs) {
      const points = arc.points.map((p) => new THREE.Vector3(...p));
      const geometry = new THREE.BufferGeometry().setFromPoints(points);
      this.arcGroup.add(
        new THREE.Line(geometry, new THREE.LineBasicMaterial({ color: 0x7dcfff })),
      );
    }
  }

  sync(state: ClientState): void {
    this.buildAnchors(state);
    this.syncObjects(state);
    this.syncGhosts(state);
    this.syncLasso(state);
    this.syncArcs(state);
  }

  render(): void {
    this.renderer.render(this.scene, this.camera);
  }
}
