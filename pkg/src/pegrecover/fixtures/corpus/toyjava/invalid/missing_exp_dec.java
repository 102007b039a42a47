public class Main {
  public static void main(String[] args) {
    int v = ;
    v = v / 3;
  }
}
