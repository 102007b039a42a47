public class Main {
  public static void main(String[] args) {
    int v = 9;
    v = v / 3;
  }
}
